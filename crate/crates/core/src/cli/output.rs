//! CSV and JSON writers. CSV floats carry 17 significant digits; JSON uses
//! the shortest representation that parses back to the same f64.

use std::io::Write;

use serde::Serialize;

use super::commands::{KernelGrid, ResultRecord, ScanReport};
use crate::error::Result;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SOLVE_HEADER: [&str; 13] = [
    "epsilon",
    "dimension",
    "theta0",
    "c",
    "b",
    "cell",
    "kind",
    "method",
    "sheet",
    "re_location",
    "im_location",
    "residual",
    "error",
];

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// One row per singularity; a record with none still gets a row.
pub fn write_records_csv<W: Write>(w: W, records: &[ResultRecord]) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SOLVE_HEADER)?;
    for r in records {
        let cfg = |k: &str| r.config.get(k).cloned().unwrap_or_default();
        let head = [
            num(r.epsilon),
            cfg("dimension"),
            num(cfg("theta0").parse().unwrap_or(f64::NAN)),
            num(cfg("c").parse().unwrap_or(f64::NAN)),
            num(cfg("b").parse().unwrap_or(f64::NAN)),
            r.regime.cell.to_string(),
        ];
        let err = r.error.clone().unwrap_or_default();
        if r.singularities.is_empty() {
            let mut row: Vec<String> = head.to_vec();
            row.extend([
                "none".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                err.clone(),
            ]);
            out.write_record(&row)?;
        }
        for s in &r.singularities {
            let mut row: Vec<String> = head.to_vec();
            row.extend([
                s.kind.as_str().into(),
                s.method.as_str().into(),
                s.sheet.index().to_string(),
                num(s.location.re),
                num(s.location.im),
                num(s.residual),
                err.clone(),
            ]);
            out.write_record(&row)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// One row per fitted ladder point.
pub fn write_verify_csv<W: Write>(w: W, rec: &ResultRecord) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record([
        "part",
        "epsilon",
        "re_numeric",
        "im_numeric",
        "re_expansion",
        "im_expansion",
        "residual",
        "fitted_slope",
        "predicted_power",
        "predicted_log_power",
        "r_squared",
    ])?;
    for f in &rec.fit {
        for (eps, res) in f.epsilons.iter().zip(&f.residuals) {
            let Some(p) = rec.ladder.iter().find(|p| p.epsilon == *eps) else {
                continue;
            };
            out.write_record([
                f.part.as_str().into(),
                num(*eps),
                num(p.numeric.re),
                num(p.numeric.im),
                num(p.expansion.re),
                num(p.expansion.im),
                num(*res),
                num(f.fitted_slope),
                num(f.predicted.power_f64()),
                f.predicted.log_power.to_string(),
                num(f.r_squared),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn write_scan_csv<W: Write>(w: W, scan: &ScanReport) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["lambda", "abs_d_upper", "abs_d_lower"])?;
    for p in &scan.points {
        out.write_record([num(p.lambda), num(p.abs_d_upper), num(p.abs_d_lower)])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_kernel_csv<W: Write>(w: W, grid: &KernelGrid) -> Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["x", "x_prime", "i", "j", "re_kernel", "im_kernel"])?;
    for p in &grid.points {
        out.write_record([
            num(p.x),
            num(p.x_prime),
            p.i.to_string(),
            p.j.to_string(),
            num(p.value.re),
            num(p.value.im),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}
