//! Run traces, CSV export, and multi-seed aggregation.

use super::EngineError;
use std::io::Write;

/// Metrics recorded at one tick.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    /// `max_i |x_i(n) - target_i|`.
    pub sup_err: f64,
    /// Span seminorm of `x(n) - target`.
    pub span_err: f64,
    /// Mean of `x(n)`.
    pub consensus: f64,
    /// Algorithm-specific columns, see [`RunTrace::extra_columns`].
    pub extras: Vec<f64>,
}

/// Time-indexed metrics emitted by a single run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub seed: u64,
    /// Echo of everything that defines the run apart from the seed; used to
    /// refuse aggregation of traces from different configurations.
    pub config_key: String,
    pub extra_columns: Vec<String>,
    pub rows: Vec<TraceRow>,
    /// Full state snapshots, only kept when requested in [`super::RunOptions`].
    pub snapshots: Vec<(u64, Vec<f64>)>,
    pub final_x: Vec<f64>,
    pub final_z: Vec<f64>,
}

impl RunTrace {
    /// CSV with columns `n,supErr,spanErr,consensus,<extras...>`.
    /// Floats carry 17 significant digits so identical runs are byte-identical.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write!(out, "n,supErr,spanErr,consensus")?;
        for c in &self.extra_columns {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
        for row in &self.rows {
            write!(out, "{},{:.16e},{:.16e},{:.16e}", row.n, row.sup_err, row.span_err, row.consensus)?;
            for v in &row.extras {
                write!(out, ",{v:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv is ascii")
    }

    pub fn final_row(&self) -> &TraceRow {
        self.rows.last().expect("a run records at least the initial row")
    }
}

/// Elementwise statistics across the seeds of one experiment.
#[derive(Debug, Clone)]
pub struct AggregateSummary {
    /// Column names in the order they appear in `mean`/`std`.
    pub columns: Vec<String>,
    pub rows: Vec<AggregateRow>,
    pub final_consensus: Vec<f64>,
    pub final_consensus_mean: f64,
    pub final_consensus_std: f64,
    /// `(lo, hi, count)` bins over the final consensus values.
    pub histogram: Vec<(f64, f64, usize)>,
}

#[derive(Debug, Clone)]
pub struct AggregateRow {
    pub n: u64,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl AggregateSummary {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        write!(out, "n")?;
        for c in &self.columns {
            write!(out, ",{c}_mean,{c}_std")?;
        }
        writeln!(out)?;
        for row in &self.rows {
            write!(out, "{}", row.n)?;
            for (m, s) in row.mean.iter().zip(&row.std) {
                write!(out, ",{m:.16e},{s:.16e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Per-tick mean/stddev of every metric over traces that share a
/// configuration, plus a histogram of final consensus values.
pub fn multi_seed_aggregate(traces: &[RunTrace]) -> Result<AggregateSummary, EngineError> {
    let first = traces.first().ok_or(EngineError::EmptyAggregate)?;
    for t in traces {
        if t.config_key != first.config_key {
            return Err(EngineError::MismatchedConfigs(format!(
                "seed {} has a different configuration than seed {}",
                t.seed, first.seed
            )));
        }
        if t.rows.len() != first.rows.len() {
            return Err(EngineError::MismatchedConfigs(format!(
                "seed {} recorded {} rows, seed {} recorded {}",
                t.seed,
                t.rows.len(),
                first.seed,
                first.rows.len()
            )));
        }
    }

    let mut columns = vec!["supErr".to_string(), "spanErr".to_string(), "consensus".to_string()];
    columns.extend(first.extra_columns.iter().cloned());
    let k = traces.len() as f64;

    let mut rows = Vec::with_capacity(first.rows.len());
    for idx in 0..first.rows.len() {
        let values: Vec<Vec<f64>> = traces
            .iter()
            .map(|t| {
                let r = &t.rows[idx];
                let mut v = vec![r.sup_err, r.span_err, r.consensus];
                v.extend(r.extras.iter().copied());
                v
            })
            .collect();
        let ncols = columns.len();
        let mut mean = vec![0.0; ncols];
        for v in &values {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x / k;
            }
        }
        let mut std = vec![0.0; ncols];
        if traces.len() > 1 {
            for v in &values {
                for ((s, x), m) in std.iter_mut().zip(v).zip(&mean) {
                    *s += (x - m) * (x - m) / (k - 1.0);
                }
            }
            for s in &mut std {
                *s = s.sqrt();
            }
        }
        rows.push(AggregateRow { n: first.rows[idx].n, mean, std });
    }

    let final_consensus: Vec<f64> = traces.iter().map(|t| t.final_row().consensus).collect();
    let mean = final_consensus.iter().sum::<f64>() / k;
    let std = if traces.len() > 1 {
        (final_consensus.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    let histogram = histogram(&final_consensus, 20);

    Ok(AggregateSummary {
        columns,
        rows,
        final_consensus,
        final_consensus_mean: mean,
        final_consensus_std: std,
        histogram,
    })
}

fn histogram(values: &[f64], bins: usize) -> Vec<(f64, f64, usize)> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() || lo == hi {
        return vec![(lo, hi, values.len())];
    }
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<(f64, f64, usize)> = (0..bins)
        .map(|b| (lo + b as f64 * width, lo + (b + 1) as f64 * width, 0))
        .collect();
    for &v in values {
        let b = (((v - lo) / width) as usize).min(bins - 1);
        out[b].2 += 1;
    }
    out
}
