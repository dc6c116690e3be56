//! CSV-facing count records, batch counting, and the ratio statistics:
//! per-n quartile summaries, theta (the maximum ratio), and the alpha
//! growth-base bounds.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::sync::Mutex;

use num_rational::Ratio;

use crate::codec::{decode_graph, GraphCode};
use crate::counting::{realisation_count, CountOptions, CountValue};
use crate::error::StatsError;
use crate::polysys::Model;
use crate::rigidity::is_minimally_d_rigid;

/// One (graph, count pair) row: code, vertex count, dimension, the two
/// realisation numbers and their exact ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountRecord {
    pub code: String,
    pub n: u32,
    pub d: u32,
    pub c: u64,
    pub c_star: u64,
}

impl CountRecord {
    pub fn new(code: impl Into<String>, n: u32, d: u32, c: u64, c_star: u64) -> Self {
        CountRecord {
            code: code.into(),
            n,
            d,
            c,
            c_star,
        }
    }

    /// Exact ratio `c*/c` in lowest terms.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.c_star, self.c)
    }

    pub fn ratio_f64(&self) -> f64 {
        self.c_star as f64 / self.c as f64
    }
}

/// CSV header used by [`emit_csv`] and expected by [`ingest_csv`].
pub const CSV_HEADER: &str = "code,n,d,c,c_star,ratio_num,ratio_den,ratio_dec";

/// Serialises records with the fixed schema, LF line endings. Optional
/// provenance lines can be prepended as `#` comments by the caller.
pub fn emit_csv(records: &[CountRecord]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let ratio = r.ratio();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{:.6}",
            r.code,
            r.n,
            r.d,
            r.c,
            r.c_star,
            ratio.numer(),
            ratio.denom(),
            r.ratio_f64()
        );
    }
    out
}

/// Parses the CSV schema back into records. `#` comment lines and the
/// header are skipped; the derived ratio columns are checked against the
/// count columns when present.
pub fn ingest_csv(text: &str) -> Result<Vec<CountRecord>, StatsError> {
    let mut records = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("code,") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 5 {
            return Err(StatsError::Csv {
                line: idx + 1,
                msg: format!("expected at least 5 fields, got {}", fields.len()),
            });
        }
        let parse_u64 = |s: &str, what: &str| -> Result<u64, StatsError> {
            s.trim().parse().map_err(|_| StatsError::Csv {
                line: idx + 1,
                msg: format!("bad {what}: {s:?}"),
            })
        };
        let rec = CountRecord {
            code: fields[0].trim().to_string(),
            n: parse_u64(fields[1], "n")? as u32,
            d: parse_u64(fields[2], "d")? as u32,
            c: parse_u64(fields[3], "c")?,
            c_star: parse_u64(fields[4], "c_star")?,
        };
        if rec.c == 0 || rec.c_star == 0 {
            return Err(StatsError::Csv {
                line: idx + 1,
                msg: "counts must be positive".into(),
            });
        }
        if fields.len() >= 7 {
            let num = parse_u64(fields[5], "ratio_num")?;
            let den = parse_u64(fields[6], "ratio_den")?;
            if Ratio::new(num.max(1), den.max(1)) != rec.ratio() && !(num == 0 && den == 0) {
                return Err(StatsError::Csv {
                    line: idx + 1,
                    msg: "ratio columns disagree with counts".into(),
                });
            }
        }
        records.push(rec);
    }
    Ok(records)
}

/// Aggregate ratio statistics for the records of one vertex count.
#[derive(Clone, Debug)]
pub struct RatioSummary {
    pub n: u32,
    pub count_equal: usize,
    pub count_differ: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    /// theta_d(n): the maximum ratio, exact.
    pub theta: Ratio<u64>,
    /// Best lower-bound witness for alpha_d among these records.
    pub alpha_lower: f64,
}

/// Type-7 quantile (sorted-list linear interpolation, inclusive median).
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n as f64 - 1.0) * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Per-n summaries (sorted by n) of the ratio distribution.
pub fn ratio_stats(records: &[CountRecord]) -> Result<Vec<RatioSummary>, StatsError> {
    if records.is_empty() {
        return Err(StatsError::EmptyInput);
    }
    let mut by_n: BTreeMap<u32, Vec<&CountRecord>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.n).or_default().push(r);
    }
    let mut out = Vec::new();
    for (n, recs) in by_n {
        let mut ratios: Vec<f64> = recs.iter().map(|r| r.ratio_f64()).collect();
        ratios.sort_by(f64::total_cmp);
        let theta = recs
            .iter()
            .map(|r| r.ratio())
            .max()
            .expect("nonempty group");
        let count_equal = recs.iter().filter(|r| r.c == r.c_star).count();
        let alpha_lower = recs
            .iter()
            .filter_map(|r| alpha_lower_bound(r, r.d).ok())
            .fold(1.0f64, f64::max);
        out.push(RatioSummary {
            n,
            count_equal,
            count_differ: recs.len() - count_equal,
            min: ratios[0],
            q1: quantile(&ratios, 0.25),
            median: quantile(&ratios, 0.5),
            q3: quantile(&ratios, 0.75),
            max: *ratios.last().unwrap(),
            theta,
            alpha_lower,
        });
    }
    Ok(out)
}

/// The gluing-power witness `(c*/c)^(1/(n-d-1))` for the alpha_d lower
/// bound; requires `n > d + 1`.
pub fn alpha_lower_bound(rec: &CountRecord, d: u32) -> Result<f64, StatsError> {
    if rec.n <= d + 1 {
        return Err(StatsError::Domain { n: rec.n, d });
    }
    let exponent = 1.0 / (rec.n as f64 - d as f64 - 1.0);
    Ok(rec.ratio_f64().powf(exponent))
}

/// Lower and upper bounds for alpha_2: the best gluing witness among the
/// records, against the constant upper bound 2 * sqrt(3).
pub fn alpha_bounds_report(records: &[CountRecord], d: u32) -> (f64, f64) {
    let lower = records
        .iter()
        .filter_map(|r| alpha_lower_bound(r, d).ok())
        .fold(1.0f64, f64::max);
    (lower, 2.0 * 3.0f64.sqrt())
}

/// Rounds the alpha interval outward to 4 decimals and formats it, e.g.
/// `1.1139 <= alpha_2 <= 3.4642`.
pub fn alpha_bounds_line(records: &[CountRecord], d: u32) -> String {
    let (lower, upper) = alpha_bounds_report(records, d);
    let lo = (lower * 1e4).floor() / 1e4;
    let hi = (upper * 1e4).ceil() / 1e4;
    format!("{lo:.4} <= alpha_{d} <= {hi:.4}")
}

/// Exact frequency of each `(c, c*)` pair, sorted by descending frequency
/// (ties by pair).
pub fn pair_distribution(records: &[CountRecord]) -> Vec<((u64, u64), u64)> {
    let mut freq: BTreeMap<(u64, u64), u64> = BTreeMap::new();
    for r in records {
        *freq.entry((r.c, r.c_star)).or_insert(0) += 1;
    }
    let mut pairs: Vec<((u64, u64), u64)> = freq.into_iter().collect();
    pairs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    pairs
}

/// Pair histogram as CSV `c,c_star,frequency`.
pub fn pair_distribution_csv(records: &[CountRecord]) -> String {
    let mut out = String::from("c,c_star,frequency\n");
    for ((c, cs), f) in pair_distribution(records) {
        let _ = writeln!(out, "{c},{cs},{f}");
    }
    out
}

/// Batch counting options.
#[derive(Clone, Debug)]
pub struct BatchOptions {
    pub d: u32,
    pub count: CountOptions,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Completed rows are appended here and reused on resume.
    pub checkpoint: Option<PathBuf>,
}

impl BatchOptions {
    pub fn new(d: u32, seed: u64) -> Self {
        BatchOptions {
            d,
            count: CountOptions::with_seed(seed),
            threads: None,
            checkpoint: None,
        }
    }
}

/// Batch outcome: records in input order plus per-graph skip reasons.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub records: Vec<CountRecord>,
    pub skipped: Vec<(String, String)>,
}

/// Counts both models for each code. Graphs that are not minimally d-rigid
/// are reported and skipped; solver errors are recorded and the batch
/// continues. Output order equals input order and is byte-identical for a
/// fixed seed regardless of the thread count: each graph derives its own
/// seed from the base seed and its code.
pub fn batch_count(codes: &[GraphCode], opts: &BatchOptions) -> Result<BatchOutcome, StatsError> {
    let done: BTreeMap<String, CountRecord> = match &opts.checkpoint {
        Some(path) if path.exists() => ingest_csv(&std::fs::read_to_string(path)?)?
            .into_iter()
            .map(|r| (r.code.clone(), r))
            .collect(),
        _ => BTreeMap::new(),
    };
    let checkpoint_file = match &opts.checkpoint {
        Some(path) => Some(Mutex::new(
            std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)?,
        )),
        None => None,
    };

    enum Row {
        Done(CountRecord),
        Skip(String, String),
    }

    let work = |code: &GraphCode| -> Row {
        let code_str = code.to_string();
        if let Some(r) = done.get(&code_str) {
            return Row::Done(r.clone());
        }
        let graph = match decode_graph(code) {
            Ok(g) => g,
            Err(e) => return Row::Skip(code_str, e.to_string()),
        };
        if !is_minimally_d_rigid(&graph, opts.d) {
            return Row::Skip(code_str, format!("not minimally {}-rigid", opts.d));
        }
        let mut count_opts = opts.count.clone();
        count_opts.seed = per_graph_seed(opts.count.seed, &code_str);
        let run = |model| realisation_count(&graph, opts.d, model, &count_opts);
        let (c, c_star) = match (run(Model::Euclidean), run(Model::Spherical)) {
            (Ok(a), Ok(b)) => match (a.value, b.value) {
                (CountValue::Finite(c), CountValue::Finite(cs)) => (c, cs),
                _ => return Row::Skip(code_str, "infinite count".into()),
            },
            (Err(e), _) | (_, Err(e)) => return Row::Skip(code_str, e.to_string()),
        };
        let rec = CountRecord::new(code_str, graph.vertex_count(), opts.d, c, c_star);
        if let Some(file) = &checkpoint_file {
            let ratio = rec.ratio();
            let line = format!(
                "{},{},{},{},{},{},{},{:.6}\n",
                rec.code,
                rec.n,
                rec.d,
                rec.c,
                rec.c_star,
                ratio.numer(),
                ratio.denom(),
                rec.ratio_f64()
            );
            let mut f = file.lock().unwrap();
            let _ = f.write_all(line.as_bytes());
            let _ = f.flush();
        }
        Row::Done(rec)
    };

    let rows: Vec<Row> = match opts.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("thread pool");
            pool.install(|| {
                use rayon::prelude::*;
                codes.par_iter().map(work).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            codes.par_iter().map(work).collect()
        }
    };

    let mut outcome = BatchOutcome::default();
    for row in rows {
        match row {
            Row::Done(rec) => {
                if rec.c_star < rec.c {
                    // This would falsify the main inequality; stop loudly.
                    return Err(StatsError::RatioViolation {
                        code: rec.code,
                        c: rec.c,
                        c_star: rec.c_star,
                    });
                }
                outcome.records.push(rec);
            }
            Row::Skip(code, reason) => outcome.skipped.push((code, reason)),
        }
    }
    Ok(outcome)
}

/// FNV-1a over the code string, mixed with the base seed.
fn per_graph_seed(base: u64, code: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ base.rotate_left(17);
    for b in code.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table1_records() -> Vec<CountRecord> {
        vec![
            CountRecord::new("7916", 6, 2, 12, 16),
            CountRecord::new("1256267", 7, 2, 24, 32),
            CountRecord::new("170957470", 8, 2, 64, 96),
            CountRecord::new("2993854888", 9, 2, 160, 288),
            CountRecord::new("4847160401729", 10, 2, 400, 768),
            CountRecord::new("5366995734673421", 11, 2, 864, 2048),
            CountRecord::new("37615476241376327552", 12, 2, 2016, 5120),
        ]
    }

    #[test]
    fn csv_round_trip() {
        let records = table1_records();
        let csv = emit_csv(&records);
        assert!(csv.starts_with(CSV_HEADER));
        assert!(!csv.contains('\r'));
        let back = ingest_csv(&csv).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn ingest_rejects_inconsistent_ratio() {
        let bad = format!("{CSV_HEADER}\n7916,6,2,12,16,99,1,1.333333\n");
        assert!(ingest_csv(&bad).is_err());
        let bad = format!("{CSV_HEADER}\n7916,6,2,0,16,4,3,1.333333\n");
        assert!(ingest_csv(&bad).is_err());
    }

    #[test]
    fn alpha_witnesses_match_published_values() {
        let records = table1_records();
        let expected = [
            1.10064, 1.07457, 1.08447, 1.10292, 1.09767, 1.11391, 1.10911,
        ];
        for (rec, want) in records.iter().zip(expected) {
            let got = alpha_lower_bound(rec, 2).unwrap();
            assert!(
                (got - want).abs() < 1e-4,
                "code {}: got {got}, want {want}",
                rec.code
            );
        }
        let small = CountRecord::new("7", 3, 2, 1, 1);
        assert!(alpha_lower_bound(&small, 2).is_err());
    }

    #[test]
    fn alpha_bounds_interval() {
        let records = table1_records();
        let (lower, upper) = alpha_bounds_report(&records, 2);
        assert!((lower - (2048.0f64 / 864.0).powf(0.125)).abs() < 1e-12);
        assert!((upper - 3.4641016151).abs() < 1e-9);
        assert_eq!(alpha_bounds_line(&records, 2), "1.1139 <= alpha_2 <= 3.4642");
        // Empty record set: the minimum achievable ratio is 1.
        let (lower, _) = alpha_bounds_report(&[], 2);
        assert_eq!(lower, 1.0);
    }

    #[test]
    fn quartile_convention() {
        // Type-7 on 1..5 gives q1 = 2, median = 3, q3 = 4.
        let sorted = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert_eq!(quantile(&sorted, 0.25), 2.0);
        assert_eq!(quantile(&sorted, 0.5), 3.0);
        assert_eq!(quantile(&sorted, 0.75), 4.0);
        // Interpolation on an even count.
        let sorted = [1.0, 2.0];
        assert_eq!(quantile(&sorted, 0.5), 1.5);
    }

    #[test]
    fn ratio_stats_single_record() {
        let recs = vec![CountRecord::new("7916", 6, 2, 12, 16)];
        let s = ratio_stats(&recs).unwrap();
        assert_eq!(s.len(), 1);
        let s = &s[0];
        let r = 16.0 / 12.0;
        for v in [s.min, s.q1, s.median, s.q3, s.max] {
            assert!((v - r).abs() < 1e-12);
        }
        assert_eq!(s.theta, Ratio::new(4, 3));
        assert_eq!((s.count_equal, s.count_differ), (0, 1));
        assert!(ratio_stats(&[]).is_err());
    }

    #[test]
    fn summary_ordering_invariant() {
        let recs = vec![
            CountRecord::new("a", 9, 2, 160, 288),
            CountRecord::new("b", 9, 2, 100, 100),
            CountRecord::new("c", 9, 2, 64, 96),
            CountRecord::new("d", 9, 2, 50, 110),
        ];
        let s = &ratio_stats(&recs).unwrap()[0];
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        assert_eq!(s.theta, Ratio::new(11, 5));
        assert!((s.max - 2.2).abs() < 1e-12);
        assert_eq!((s.count_equal, s.count_differ), (1, 3));
    }

    #[test]
    fn pair_distribution_sorted_by_frequency() {
        let recs = vec![
            CountRecord::new("a", 6, 2, 8, 8),
            CountRecord::new("b", 6, 2, 8, 8),
            CountRecord::new("c", 6, 2, 12, 16),
        ];
        let pairs = pair_distribution(&recs);
        assert_eq!(pairs, vec![((8, 8), 2), ((12, 16), 1)]);
        assert!(pair_distribution(&[]).is_empty());
        let csv = pair_distribution_csv(&recs);
        assert!(csv.starts_with("c,c_star,frequency\n8,8,2\n"));
    }
}
