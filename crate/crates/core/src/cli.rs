//! Command-line front end. [`run`] parses arguments, dispatches to the
//! analysis and writes the report; it returns the process exit status.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::density::{density_verdict, prefix_density};
use crate::dsl;
use crate::error::{Error, Result};
use crate::numeric::{Exponent, Mode, Num, Rational, Scalar};
use crate::point::{NormKind, Point};
use crate::report;
use crate::sequence::parse_coords;
use crate::series::{
    build_blocks, default_functionals, default_points, h_bound, operator_norm_check, subset_sum_wp,
    swp_membership, weak_star_wp_membership, weak_wp_membership, wuc_verdict, CoefficientSpec, FunctionalSpec,
    DEFAULT_BUDGET, DEFAULT_PANEL_SEED,
};
use crate::summability::means::mean_table;
use crate::summability::{
    cesaro_mean, connor_cross_check, divergence_witness, statistical_cauchy_check, statistical_verdict,
    stolz_cesaro_check, wp_membership, wp_verdict, CheckpointPolicy, EpsSchedule,
};
use crate::table::{FileFormat, SequenceTable};

pub const SEED_ENV: &str = "SUMMABILITY_SEED";

#[derive(Debug, Parser)]
#[command(name = "summability", version, about = "Strong p-Cesàro and statistical summability diagnostics")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, default_value = "float")]
    pub mode: Mode,
    #[arg(long, global = true, default_value = "max")]
    pub norm: NormKind,
    /// Cesàro exponent, a positive rational.
    #[arg(long, global = true)]
    pub p: Option<Exponent>,
    #[arg(long, global = true)]
    pub n0: Option<u64>,
    #[arg(long, global = true)]
    pub growth: Option<f64>,
    #[arg(long, global = true)]
    pub count: Option<usize>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub decay_ratio: Option<f64>,
    #[arg(long, global = true)]
    pub div_threshold: Option<f64>,
    #[arg(long, global = true)]
    pub band: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    pub format: String,
    /// Hex seed for random panels and samples; falls back to $SUMMABILITY_SEED.
    #[arg(long, global = true)]
    pub seed: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Natural density of an index set.
    Density {
        #[arg(long)]
        set: String,
        /// Also report the prefix density at this n.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Cesàro means, at `--n` or along the checkpoints.
    Cesaro {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Strong p-Cesàro summability.
    Wp {
        #[arg(long)]
        seq: String,
        /// Test this limit instead of searching for one.
        #[arg(long)]
        limit: Option<String>,
    },
    /// Statistical convergence.
    Stat {
        #[arg(long)]
        seq: String,
        /// Decreasing radii, e.g. `1,1/2,1/4`.
        #[arg(long)]
        eps: Option<String>,
    },
    /// Statistical Cauchy criterion for one radius.
    Cauchy {
        #[arg(long)]
        seq: String,
        #[arg(long, default_value = "1/2")]
        eps: String,
        #[arg(long, default_value_t = 1)]
        n: u64,
    },
    /// Statistical and strong verdicts side by side.
    Connor {
        #[arg(long)]
        seq: String,
    },
    /// Subsequence along which the p-power averages grow.
    Witness {
        #[arg(long)]
        seq: String,
    },
    /// Trend of a partial-sum sequence against its Cesàro means.
    Stolz {
        #[arg(long)]
        seq: String,
    },
    /// Sup over sign patterns of the first n partial sums.
    Hbound {
        #[arg(long)]
        series: String,
        #[arg(long)]
        n: u64,
    },
    /// Weak unconditional Cauchy verdict.
    Wuc {
        #[arg(long)]
        series: String,
    },
    /// Membership of a coefficient sequence in the series space.
    Member {
        #[arg(long)]
        series: String,
        #[arg(long)]
        coeffs: String,
    },
    /// Null coefficients whose weighted series diverges.
    Construct {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 2)]
        blocks: u32,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Membership through a panel of functionals.
    Weak {
        #[arg(long)]
        series: String,
        #[arg(long)]
        coeffs: String,
        /// CSV with one functional per row.
        #[arg(long)]
        functionals: Option<PathBuf>,
    },
    /// Membership of a functional series through a panel of points.
    Weakstar {
        #[arg(long)]
        series: String,
        #[arg(long)]
        coeffs: String,
        /// CSV with one point per row.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Sums of a functional series over an index set, evaluated at x.
    Subset {
        #[arg(long)]
        series: String,
        #[arg(long)]
        set: String,
        #[arg(long)]
        x: String,
    },
    /// The bound ‖T(a)‖ ≤ H‖a‖∞ on given and random coefficients.
    Opnorm {
        #[arg(long)]
        series: String,
        #[arg(long)]
        coeffs: Vec<String>,
        /// Number of seeded random coefficient sequences with bound 1.
        #[arg(long, default_value_t = 0)]
        samples: u64,
    },
}

impl GlobalArgs {
    pub fn policy(&self) -> Result<CheckpointPolicy> {
        let d = CheckpointPolicy::default();
        let policy = CheckpointPolicy {
            n0: self.n0.unwrap_or(d.n0),
            growth: self.growth.unwrap_or(d.growth),
            count: self.count.unwrap_or(d.count),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            decay_ratio: self.decay_ratio.unwrap_or(d.decay_ratio),
            div_threshold: self.div_threshold.unwrap_or(d.div_threshold),
            band: self.band.unwrap_or(d.band),
            norm: self.norm,
        };
        policy.validate()?;
        Ok(policy)
    }

    pub fn seed(&self) -> Result<u64> {
        match &self.seed {
            Some(s) => dsl::parse_seed(s),
            None => match std::env::var(SEED_ENV) {
                Ok(s) => dsl::parse_seed(&s),
                Err(_) => Ok(DEFAULT_PANEL_SEED),
            },
        }
    }
}

struct Produced {
    operation: &'static str,
    spec: Map<String, Value>,
    p: Option<Exponent>,
    body: Value,
    /// Set when a partial report accompanies a failure.
    failure: Option<Error>,
}

struct Ctx {
    policy: CheckpointPolicy,
    p: Exponent,
    seed: u64,
}

fn spec_of(pairs: &[(&str, &str)]) -> Map<String, Value> {
    pairs.iter().map(|(k, v)| (k.to_string(), Value::String(v.to_string()))).collect()
}

/// Merges the keys of `extra` into `body`, overwriting.
fn with_fields(mut body: Value, extra: Value) -> Value {
    if let (Value::Object(b), Value::Object(e)) = (&mut body, extra) {
        b.extend(e);
    }
    body
}

fn read_rows(path: &Path) -> Result<Vec<Vec<Num>>> {
    let text = std::fs::read_to_string(path)?;
    let table = SequenceTable::parse_str(&text, FileFormat::detect(&text), path.display().to_string())?;
    Ok(table.rows().to_vec())
}

fn execute<T: Scalar>(cmd: &Command, ctx: &Ctx) -> Result<Produced> {
    let policy = &ctx.policy;
    let p = ctx.p;
    let produced = |operation, spec, p, body| Produced {
        operation,
        spec,
        p,
        body,
        failure: None,
    };
    Ok(match cmd {
        Command::Density { set, n } => {
            let s = dsl::parse_set(set)?;
            let est = density_verdict::<T>(&s, policy)?;
            let mut body = est.to_json::<T>();
            if let Some(n) = n {
                let d = prefix_density::<T>(&s, *n)?;
                body = with_fields(body, json!({"prefix_density": [n, T::from_rational(&d).to_json()]}));
            }
            produced("density", spec_of(&[("set", set)]), None, body)
        }
        Command::Cesaro { seq, n } => {
            let s = dsl::parse_sequence(seq)?;
            let rows = match n {
                Some(n) => vec![(*n, cesaro_mean::<T>(&s, *n)?)],
                None => {
                    let cps = policy.checkpoints();
                    mean_table(&s.prefix::<T>(policy.final_n())?, &cps)
                }
            };
            let cps: Vec<Value> = rows.iter().map(|(n, m)| json!([n, m.to_json()])).collect();
            let body = json!({
                "mean": rows.last().map(|(_, m)| m.to_json()),
                "checkpoints": cps,
            });
            produced("cesaro", spec_of(&[("seq", seq)]), None, body)
        }
        Command::Wp { seq, limit } => {
            let s = dsl::parse_sequence(seq)?;
            let v = match limit {
                Some(l) => {
                    let hint = Point::<T>::from_nums(&parse_coords(l)?);
                    wp_verdict::<T>(&s, p, policy, Some(&hint))?
                }
                None => wp_membership::<T>(&s, p, policy)?,
            };
            let mut spec = spec_of(&[("seq", seq)]);
            if let Some(l) = limit {
                spec.insert("limit".into(), l.clone().into());
            }
            produced("wp", spec, Some(p), v.to_json())
        }
        Command::Stat { seq, eps } => {
            let s = dsl::parse_sequence(seq)?;
            let schedule = match eps {
                Some(e) => EpsSchedule::new(dsl::parse_eps_list(e)?)?,
                None => EpsSchedule::default(),
            };
            let v = statistical_verdict::<T>(&s, policy, &schedule)?;
            let eps_json: Vec<Value> = schedule.values().iter().map(|e| T::from_num(e).to_json()).collect();
            let body = with_fields(v.to_json(), json!({"eps": eps_json}));
            produced("stat", spec_of(&[("seq", seq)]), None, body)
        }
        Command::Cauchy { seq, eps, n } => {
            let s = dsl::parse_sequence(seq)?;
            let e: Num = eps.parse()?;
            let r = statistical_cauchy_check::<T>(&s, &e, *n, policy)?;
            let body = with_fields(r.to_json(), json!({"eps": T::from_num(&e).to_json(), "n": n}));
            produced("cauchy", spec_of(&[("seq", seq)]), None, body)
        }
        Command::Connor { seq } => {
            let s = dsl::parse_sequence(seq)?;
            let r = connor_cross_check::<T>(&s, p, policy)?;
            let body = with_fields(
                r.to_json(),
                json!({
                    "outcome": r.wp.kind().to_string(),
                    "limit": r.wp.outcome.limit().map(Point::to_json),
                    "checkpoints": r.wp.to_json()["checkpoints"].clone(),
                    "candidate_L": r.stat.candidate.as_ref().map(Point::to_json),
                }),
            );
            produced("connor", spec_of(&[("seq", seq)]), Some(p), body)
        }
        Command::Witness { seq } => {
            let s = dsl::parse_sequence(seq)?;
            let w = divergence_witness::<T>(&s, p, policy)?;
            let body = match &w {
                Some(w) => json!({
                    "outcome": "Diverges",
                    "witness": w.to_json(),
                    "checkpoints": w.to_json()["terms"].clone(),
                }),
                None => json!({
                    "outcome": "Inconclusive",
                    "witness": null,
                    "notes": ["no growing subsequence of p-power averages"],
                }),
            };
            produced("witness", spec_of(&[("seq", seq)]), Some(p), body)
        }
        Command::Stolz { seq } => {
            let s = dsl::parse_sequence(seq)?;
            let r = stolz_cesaro_check::<T>(&s, policy)?;
            let body = with_fields(
                r.to_json(),
                json!({
                    "outcome": r.means.kind().to_string(),
                    "limit": r.means.outcome.limit().map(Point::to_json),
                    "checkpoints": r.means.to_json()["checkpoints"].clone(),
                }),
            );
            produced("stolz", spec_of(&[("seq", seq)]), None, body)
        }
        Command::Hbound { series, n } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let h = h_bound::<T>(&s, *n)?;
            let body = json!({"H": h.to_json(), "n": n, "checkpoints": [[n, h.to_json()]]});
            produced("hbound", spec_of(&[("series", series)]), None, body)
        }
        Command::Wuc { series } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let v = wuc_verdict::<T>(&s, policy)?;
            produced("wuc", spec_of(&[("series", series)]), None, v.to_json())
        }
        Command::Member { series, coeffs } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let c = dsl::parse_coeffs(coeffs)?;
            let v = swp_membership::<T>(&s, &c, p, policy)?;
            produced("member", spec_of(&[("series", series), ("coeffs", coeffs)]), Some(p), v.to_json())
        }
        Command::Construct { f, blocks, budget } => {
            let fs = dsl::parse_scalar_input(f)?;
            let (done, err) = build_blocks::<T>(&fs, *blocks, *budget)?;
            let table: Vec<Value> = done.iter().map(|b| b.to_json()).collect();
            let cps: Vec<Value> = done.iter().map(|b| json!([b.end, b.signed_sum.to_json()])).collect();
            let notes: Vec<String> = err.iter().map(ToString::to_string).collect();
            let body = json!({
                "blocks": table,
                "checkpoints": cps,
                "budget": budget,
                "budget_exhausted": err.is_some(),
                "notes": notes,
            });
            Produced {
                operation: "construct",
                spec: spec_of(&[("f", f)]),
                p: None,
                body,
                failure: err,
            }
        }
        Command::Weak {
            series,
            coeffs,
            functionals,
        } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let c = dsl::parse_coeffs(coeffs)?;
            let panel = match functionals {
                Some(path) => read_rows(path)?
                    .into_iter()
                    .map(FunctionalSpec::new)
                    .collect::<Result<Vec<_>>>()?,
                None => default_functionals(s.dim(), ctx.seed),
            };
            let r = weak_wp_membership::<T>(&s, &c, &panel, p, policy)?;
            let body = with_fields(r.aggregate.to_json(), r.to_json());
            let mut spec = spec_of(&[("series", series), ("coeffs", coeffs)]);
            if let Some(path) = functionals {
                spec.insert("functionals".into(), path.display().to_string().into());
            }
            produced("weak", spec, Some(p), body)
        }
        Command::Weakstar { series, coeffs, points } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let c = dsl::parse_coeffs(coeffs)?;
            let panel = match points {
                Some(path) => read_rows(path)?,
                None => default_points(s.dim(), ctx.seed),
            };
            let r = weak_star_wp_membership::<T>(s.terms(), &c, &panel, p, policy)?;
            let body = with_fields(r.aggregate.to_json(), r.to_json());
            let mut spec = spec_of(&[("series", series), ("coeffs", coeffs)]);
            if let Some(path) = points {
                spec.insert("points".into(), path.display().to_string().into());
            }
            produced("weakstar", spec, Some(p), body)
        }
        Command::Subset { series, set, x } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let m = dsl::parse_set(set)?;
            let point = parse_coords(x)?;
            let v = subset_sum_wp::<T>(s.terms(), &m, &point, p, policy)?;
            produced(
                "subset",
                spec_of(&[("series", series), ("set", set), ("x", x)]),
                Some(p),
                v.to_json(),
            )
        }
        Command::Opnorm {
            series,
            coeffs,
            samples,
        } => {
            let s = dsl::parse_series(series, policy.norm)?;
            let mut specs = coeffs
                .iter()
                .map(|c| dsl::parse_coeffs(c))
                .collect::<Result<Vec<_>>>()?;
            for i in 0..*samples {
                specs.push(CoefficientSpec::random(ctx.seed.wrapping_add(i), Num::int(1))?);
            }
            if specs.is_empty() {
                return Err(Error::invalid("opnorm needs --coeffs or --samples"));
            }
            let r = operator_norm_check::<T>(&s, &specs, p, policy)?;
            let mut labels: Vec<String> = coeffs.clone();
            labels.extend((0..*samples).map(|i| format!("random:seed={:x},bound=1", ctx.seed.wrapping_add(i))));
            let mut body = r.to_json();
            if let Some(rows) = body["samples"].as_array_mut() {
                for (row, label) in rows.iter_mut().zip(&labels) {
                    row["coeffs"] = label.clone().into();
                }
            }
            let body = with_fields(
                body,
                json!({
                    "outcome": r.wuc.kind().to_string(),
                    "checkpoints": r.wuc.to_json()["checkpoints"].clone(),
                    "all_bounded": r.all_bounded(),
                }),
            );
            let mut spec = spec_of(&[("series", series)]);
            spec.insert("coeffs".into(), json!(labels));
            produced("opnorm", spec, Some(p), body)
        }
    })
}

/// 2 for malformed input or configuration, 3 for analyses whose
/// preconditions fail.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Invalid(_) | Error::OutOfRange { .. } | Error::Dimension { .. } | Error::Io(_) => 2,
        Error::Mode(_) | Error::Precondition(_) | Error::Budget { .. } => 3,
    }
}

fn render(cli: &Cli, produced: Produced, policy: &CheckpointPolicy) -> Result<String> {
    let report = report::envelope(
        produced.operation,
        produced.spec,
        produced.p,
        policy,
        cli.global.mode,
        produced.body,
    );
    report::validate_report(&report)?;
    match cli.global.format.as_str() {
        "csv" => report::render_csv(&report),
        _ => Ok(report::render_json(&report)),
    }
}

pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let fail = |err: &mut dyn Write, e: &Error| {
        let _ = writeln!(err, "error: {e}");
        exit_code(e)
    };
    let ctx = match (cli.global.policy(), cli.global.seed()) {
        (Ok(policy), Ok(seed)) => Ctx {
            policy,
            p: cli.global.p.unwrap_or(Exponent::ONE),
            seed,
        },
        (Err(e), _) | (_, Err(e)) => return fail(err, &e),
    };
    let produced = match cli.global.mode {
        Mode::Exact => execute::<Rational>(&cli.command, &ctx),
        Mode::Float => execute::<f64>(&cli.command, &ctx),
    };
    let produced = match produced {
        Ok(p) => p,
        Err(e) => return fail(err, &e),
    };
    let failure = produced.failure.as_ref().map(|e| (e.to_string(), exit_code(e)));
    let text = match render(&cli, produced, &ctx.policy) {
        Ok(t) => t,
        Err(e) => return fail(err, &e),
    };
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &text),
        None => out.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        return fail(err, &Error::Io(e));
    }
    match failure {
        Some((msg, code)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
        None => 0,
    }
}
