//! The `track` subcommand: strictly sequential stream tracking.

use std::io::{BufRead, BufReader, Read};

use clap::Args;
use robust_cs::{
    default_lambda, Error, LambdaSchedule, MomentOrder, RcsConfig, RcsTracker, Result,
};

use crate::fmt_value;

/// Query schedule for emitted rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryArg {
    All,
    Geometric(f64),
}

fn parse_query(s: &str) -> std::result::Result<QueryArg, String> {
    if s == "all" {
        return Ok(QueryArg::All);
    }
    if let Some(ratio) = s.strip_prefix("geom:") {
        let r: f64 = ratio
            .parse()
            .map_err(|_| format!("bad geometric ratio {ratio:?}"))?;
        if !(r.is_finite() && r > 1.0) {
            return Err(format!("geometric ratio must exceed 1, got {r}"));
        }
        return Ok(QueryArg::Geometric(r));
    }
    Err(format!("expected `all` or `geom:<ratio>`, got {s:?}"))
}

#[derive(Args)]
pub struct TrackArgs {
    /// Input file of newline-delimited numbers; `-` reads standard input.
    pub input: String,

    /// Miscoverage level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Total-variation contamination radius.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,

    /// Variance bound (sets p = 2); mutually exclusive with --kappa/--p.
    #[arg(long, conflicts_with_all = ["kappa", "p"])]
    pub sigma2: Option<f64>,

    /// Bound on the p-th absolute central moment; requires --p.
    #[arg(long, requires = "p")]
    pub kappa: Option<f64>,

    /// Moment order in (1, 2].
    #[arg(long)]
    pub p: Option<f64>,

    /// Constant weight, or the coefficient when --lambda-exponent is given.
    /// Defaults to the tuned constant (requires epsilon > 0).
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Power-law exponent u for the schedule λ_t = λ · t^u.
    #[arg(long)]
    pub lambda_exponent: Option<f64>,

    /// Root-finder tolerance; defaults to 1e-9 · max(1, κ^(1/p)).
    #[arg(long)]
    pub tol: Option<f64>,

    /// Row schedule: `all` or `geom:<ratio>`. The final row is always emitted.
    #[arg(long, default_value = "geom:1.2", value_parser = parse_query)]
    pub query: QueryArg,
}

impl TrackArgs {
    pub fn config(&self) -> Result<RcsConfig> {
        match (self.sigma2, self.kappa, self.p) {
            (Some(s2), None, None) => RcsConfig::with_variance(s2, self.epsilon, self.alpha),
            (None, Some(k), Some(p)) => {
                RcsConfig::new(MomentOrder::new(p)?, k, self.epsilon, self.alpha)
            }
            (None, None, None) => RcsConfig::with_variance(1.0, self.epsilon, self.alpha),
            _ => Err(Error::Domain(
                "specify either --sigma2 or both --kappa and --p".to_string(),
            )),
        }
    }

    pub fn schedule(&self, cfg: &RcsConfig) -> Result<LambdaSchedule> {
        let coeff = match self.lambda {
            Some(l) => l,
            None => default_lambda(cfg)?,
        };
        match self.lambda_exponent {
            Some(u) => LambdaSchedule::power(coeff, u),
            None => LambdaSchedule::constant(coeff),
        }
    }
}

pub fn run(args: &TrackArgs) -> Result<()> {
    let cfg = args.config()?;

    let reader: Box<dyn Read> = if args.input == "-" {
        Box::new(std::io::stdin())
    } else {
        Box::new(std::fs::File::open(&args.input)?)
    };
    let reader = BufReader::new(reader);

    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    use std::io::Write;
    writeln!(out, "t,x,lower,upper,estimate")?;

    // built at the first observation, so empty input never trips the
    // default-lambda policy
    let mut tracker: Option<RcsTracker> = None;
    let mut next_query = 1u64;
    let mut last_emitted = 0u64;
    let mut last_x = 0.0f64;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let x: f64 = text.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            msg: format!("unparseable number {text:?}"),
        })?;
        let tracker = match tracker.as_mut() {
            Some(t) => t,
            None => {
                let mut fresh = RcsTracker::new(cfg, args.schedule(&cfg)?)?;
                if let Some(tol) = args.tol {
                    fresh = fresh.with_tolerance(tol)?;
                }
                tracker.get_or_insert(fresh)
            }
        };
        tracker.update(x)?;
        last_x = x;
        let t = tracker.t();
        if t >= next_query {
            emit_row(&mut out, tracker, t, x)?;
            last_emitted = t;
            next_query = match args.query {
                QueryArg::All => t + 1,
                QueryArg::Geometric(r) => ((t as f64 * r).ceil() as u64).max(t + 1),
            };
        }
    }
    if let Some(tracker) = tracker.as_mut() {
        let t = tracker.t();
        if last_emitted < t {
            emit_row(&mut out, tracker, t, last_x)?;
        }
    }
    Ok(())
}

fn emit_row(
    out: &mut impl std::io::Write,
    tracker: &mut RcsTracker,
    t: u64,
    x: f64,
) -> Result<()> {
    let ci = tracker.query_interval()?;
    let estimate = tracker.point_estimate()?;
    writeln!(
        out,
        "{},{},{},{},{}",
        t,
        fmt_value(x),
        fmt_value(ci.lower),
        fmt_value(ci.upper),
        fmt_value(estimate)
    )?;
    Ok(())
}
