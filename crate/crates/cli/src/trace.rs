use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use cavity_route::TraceResult;

use crate::error::{CliError, CliResult};

/// Values for the closing `# t_star=.. fidelity=.. phase=..` comment.
#[derive(Debug, Clone, PartialEq)]
pub struct Footer {
    pub t_star: f64,
    pub fidelity: f64,
    pub phase: f64,
    /// Extra `key=value` pairs appended to the same line.
    pub extra: Vec<(String, f64)>,
}

pub fn write_trace_csv<W: Write>(mut w: W, trace: &TraceResult, footer: &Footer) -> io::Result<()> {
    write!(w, "t,F")?;
    for l in &trace.labels {
        write!(w, ",{l}")?;
    }
    writeln!(w, ",norm")?;
    for i in 0..trace.len() {
        write!(w, "{:.12},{:.12}", trace.times[i], trace.photon[i])?;
        for series in &trace.tracked {
            write!(w, ",{:.12}", series[i])?;
        }
        writeln!(w, ",{:.12}", trace.norms[i])?;
    }
    write!(
        w,
        "# t_star={:.12} fidelity={:.12} phase={:.12}",
        footer.t_star, footer.fidelity, footer.phase
    )?;
    for (k, v) in &footer.extra {
        write!(w, " {k}={v:.12}")?;
    }
    writeln!(w)
}

pub fn emit_trace_csv(trace: &TraceResult, footer: &Footer, path: &Path) -> CliResult<()> {
    if trace.is_empty() {
        return Err(CliError::numeric("trace has no samples"));
    }
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_trace_csv(&mut w, trace, footer).map_err(io_err)?;
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use cavity_route::ExcitationState;
    use num_complex::Complex64;

    fn three_samples() -> TraceResult {
        TraceResult {
            times: vec![0.0, 0.5, 1.0],
            photon: vec![0.0, 0.25, 0.5],
            labels: vec!["a1".into(), "a4".into()],
            tracked: vec![vec![1.0, 0.75, 0.5], vec![0.0, 0.0, 0.0]],
            norms: vec![1.0; 3],
            final_state: ExcitationState::vacuum(2),
            final_amplitude: Complex64::new(0.0, 0.0),
            final_fidelity: 0.0,
            total_time: 1.0,
        }
    }

    #[test]
    fn layout() {
        let mut buf = Vec::new();
        let footer = Footer { t_star: 1.0, fidelity: 0.5, phase: -0.25, extra: vec![("H1".into(), 2.0)] };
        write_trace_csv(&mut buf, &three_samples(), &footer).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[0], "t,F,a1,a4,norm");
        assert_eq!(lines[2], "0.500000000000,0.250000000000,0.750000000000,0.000000000000,1.000000000000");
        assert_eq!(
            lines[4],
            "# t_star=1.000000000000 fidelity=0.500000000000 phase=-0.250000000000 H1=2.000000000000"
        );
    }

    #[test]
    fn empty_trace_rejected() {
        let mut t = three_samples();
        t.times.clear();
        let footer = Footer { t_star: 0.0, fidelity: 0.0, phase: 0.0, extra: vec![] };
        let dir = std::env::temp_dir().join("cavity-route-empty-trace.csv");
        assert!(matches!(emit_trace_csv(&t, &footer, &dir), Err(CliError::Numeric(_))));
    }
}
