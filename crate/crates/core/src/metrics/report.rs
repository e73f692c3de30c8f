use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::correlation::population_std;

/// One scored (instance, seed, metric) triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub instance_id: String,
    pub seed: u64,
    /// Metric name: `logical_translation`, `most_similar`, `ranking_eq`,
    /// `ranking_neg` or `ranking_both`.
    pub task: String,
    pub variant: String,
    pub score: f64,
    #[serde(default)]
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub task: String,
    pub count: usize,
    /// Mean over every record of this metric.
    pub mean: f64,
    /// Population standard deviation of the per-seed means.
    pub std_across_seeds: f64,
    pub per_seed: BTreeMap<u64, f64>,
    /// Number of records carrying each flag.
    pub flags: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub records: Vec<ScoreRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl ScoreReport {
    /// Sorts records by (instance, seed, metric) and computes aggregates.
    pub fn new(mut records: Vec<ScoreRecord>) -> Self {
        records.sort_by(|a, b| {
            (&a.instance_id, a.seed, &a.task, &a.variant).cmp(&(&b.instance_id, b.seed, &b.task, &b.variant))
        });
        let mut by_task: BTreeMap<&str, Vec<&ScoreRecord>> = BTreeMap::new();
        for r in &records {
            by_task.entry(r.task.as_str()).or_default().push(r);
        }
        let aggregates = by_task
            .into_iter()
            .map(|(task, rs)| {
                let mut seeds: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
                let mut flags: BTreeMap<String, usize> = BTreeMap::new();
                for r in &rs {
                    let e = seeds.entry(r.seed).or_default();
                    e.0 += r.score;
                    e.1 += 1;
                    for f in &r.flags {
                        *flags.entry(f.clone()).or_default() += 1;
                    }
                }
                let per_seed: BTreeMap<u64, f64> = seeds.into_iter().map(|(s, (sum, n))| (s, sum / n as f64)).collect();
                let seed_means: Vec<f64> = per_seed.values().copied().collect();
                Aggregate {
                    task: task.to_string(),
                    count: rs.len(),
                    mean: rs.iter().map(|r| r.score).sum::<f64>() / rs.len() as f64,
                    std_across_seeds: population_std(&seed_means),
                    per_seed,
                    flags,
                }
            })
            .collect();
        ScoreReport { records, aggregates }
    }

    pub fn aggregate(&self, task: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.task == task)
    }

    pub fn mean(&self, task: &str) -> Option<f64> {
        self.aggregate(task).map(|a| a.mean)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Columns `instance_id, seed, task, variant, score, flags`; flags are
    /// joined with `;`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["instance_id", "seed", "task", "variant", "score", "flags"])
            .expect("in-memory write");
        for r in &self.records {
            w.write_record([
                r.instance_id.as_str(),
                &r.seed.to_string(),
                &r.task,
                &r.variant,
                &r.score.to_string(),
                &r.flags.join(";"),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Human-readable summary, one line per metric.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for a in &self.aggregates {
            out.push_str(&format!("{:<20} {:.4} ± {:.4}  (n={})", a.task, a.mean, a.std_across_seeds, a.count));
            if !a.flags.is_empty() {
                let flags: Vec<String> = a.flags.iter().map(|(f, n)| format!("{f}={n}")).collect();
                out.push_str(&format!("  [{}]", flags.join(", ")));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, seed: u64, score: f64, flags: &[&str]) -> ScoreRecord {
        ScoreRecord {
            instance_id: id.into(),
            seed,
            task: "most_similar".into(),
            variant: "fol".into(),
            score,
            flags: flags.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn aggregates() {
        let r = ScoreReport::new(vec![
            rec("b", 3, 1.0, &[]),
            rec("a", 3, 0.0, &["malformed"]),
            rec("a", 12, 1.0, &[]),
            rec("b", 12, 1.0, &[]),
        ]);
        assert_eq!(r.records[0].instance_id, "a");
        let a = r.aggregate("most_similar").unwrap();
        assert_eq!(a.mean, 0.75);
        assert_eq!(a.per_seed[&3], 0.5);
        assert_eq!(a.std_across_seeds, 0.25);
        assert_eq!(a.flags["malformed"], 1);
        let csv = r.to_csv();
        assert!(csv.starts_with("instance_id,seed,task,variant,score,flags\na,3,most_similar,fol,0,malformed\n"));
        assert_eq!(ScoreReport::from_json(&r.to_json()).unwrap(), r);
    }
}
