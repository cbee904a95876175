//! CSV and report serialization.

use std::io::Write;
use std::path::Path;

use hybrid_minnorm::hybrid::Phase;
use hybrid_minnorm::HybridTrajectoryF64;

use crate::CliError;

/// 17 significant digits.
pub fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn trajectory_header(n: usize, m_d: usize) -> Vec<String> {
    let mut h = vec!["t".to_string(), "j".to_string()];
    h.extend((0..n).map(|i| format!("x{i}")));
    h.push("V".into());
    h.push("phase".into());
    h.extend((0..m_d).map(|i| format!("ud{i}")));
    h
}

pub fn write_trajectory<W: Write>(w: W, traj: &HybridTrajectoryF64, n: usize, m_d: usize) -> Result<(), CliError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(trajectory_header(n, m_d))?;
    for s in &traj.samples {
        let mut row = vec![real(s.t), s.j.to_string()];
        row.extend(s.x.iter().map(|v| real(*v)));
        row.push(real(s.v));
        row.push(s.phase.to_string());
        let jump = match s.phase {
            Phase::JumpPre => traj.jump_log.iter().find(|r| r.j == s.j),
            Phase::JumpPost => traj.jump_log.iter().find(|r| r.j + 1 == s.j),
            Phase::Flow => None,
        };
        match jump {
            Some(r) => row.extend(r.u_d.iter().map(|v| real(*v))),
            None => row.extend(std::iter::repeat_n(String::new(), m_d)),
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// One `name,value` pair per line.
pub fn write_report(path: &Path, lines: &[(String, String)]) -> Result<(), CliError> {
    let mut out = csv::Writer::from_path(path)?;
    for (k, v) in lines {
        out.write_record([k, v])?;
    }
    out.flush()?;
    Ok(())
}
