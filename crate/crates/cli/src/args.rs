use clap::{Args, Parser, Subcommand};
use stable_extrema::{make_params, params_from_beta, Parameters, RationalAlpha};

use crate::output::Format;
use crate::run::ConfigError;
use crate::suites::Suite;

#[derive(Debug, Parser)]
#[command(
    name = "stable-extrema",
    version,
    about = "Supremum of strictly stable Levy processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Wiener-Hopf factor phi(z) = E exp(-z S_e) for real z > 0.
    Phi(PhiArgs),
    /// Mellin transform M(s) = E S_1^{s-1}.
    Mellin(MellinArgs),
    /// Density or distribution function of S_1 (or S_t).
    Density(DensityArgs),
    /// Run verification suites and report residuals.
    Verify(VerifyArgs),
    /// Random-walk approximations of S_1.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Stability index: a decimal, or m/n for an exact rational value.
    #[arg(long)]
    pub alpha: String,
    /// Positivity parameter P(X_1 > 0); a decimal or a fraction such as 2/3.
    #[arg(long, conflicts_with = "beta", value_parser = parse_real)]
    pub rho: Option<f64>,
    /// Skewness parameter, converted to rho.
    #[arg(long, value_parser = parse_real, allow_hyphen_values = true)]
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub output: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PhiArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    pub z: Option<f64>,
    /// start:stop:count:lin|log
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// double-gamma, rational-alpha, ckl-product, log-series, darling-quadrature or auto.
    #[arg(long, default_value = "auto")]
    pub method: String,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MellinArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    pub s: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Imaginary part added to every s.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub imag: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DensityMethod {
    Auto,
    Series,
    AsymptoticSmall,
    AsymptoticLarge,
    Inversion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Quantity {
    Pdf,
    Cdf,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, conflicts_with = "grid", allow_hyphen_values = true)]
    pub x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value_t = DensityMethod::Auto)]
    pub method: DensityMethod,
    #[arg(long, value_enum, default_value_t = Quantity::Pdf)]
    pub quantity: Quantity,
    /// Time t for S_t.
    #[arg(long, default_value_t = 1.0)]
    pub time: f64,
    /// Tolerance of Mellin inversion.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "all")]
    pub suite: Suite,
    /// Parameters for the functional-equation suite; random admissible points otherwise.
    #[arg(long, requires = "rho")]
    pub alpha: Option<String>,
    #[arg(long, value_parser = parse_real)]
    pub rho: Option<f64>,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Paths per Monte Carlo batch.
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Steps per path (a power of two).
    #[arg(long, default_value_t = 16_384)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1024)]
    pub steps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also report the KS distance to the analytic distribution function.
    #[arg(long)]
    pub ks: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A decimal or a quotient `a/b` of decimals.
pub fn parse_real(s: &str) -> Result<f64, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("cannot parse '{s}' as a number"))
    };
    match s.split_once('/') {
        Some((a, b)) => Ok(num(a)? / num(b)?),
        None => num(s),
    }
}

/// `m/n` gives an exact rational value, anything else a float.
pub fn parse_alpha(s: &str) -> Result<(f64, Option<RationalAlpha>), ConfigError> {
    let s = s.trim();
    if let Some((m, n)) = s.split_once('/') {
        let m: u32 = m
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("bad numerator in alpha '{s}'")))?;
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| ConfigError(format!("bad denominator in alpha '{s}'")))?;
        let ra = RationalAlpha::new(m, n).map_err(|e| ConfigError(e.to_string()))?;
        return Ok((ra.value(), Some(ra)));
    }
    let v: f64 = s
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse alpha '{s}'")))?;
    Ok((v, None))
}

impl ParamArgs {
    pub fn to_params(&self) -> Result<Parameters, ConfigError> {
        let (alpha, ra) = parse_alpha(&self.alpha)?;
        let p = match (self.rho, self.beta) {
            (Some(rho), None) => make_params(alpha, rho),
            (None, Some(beta)) => params_from_beta(alpha, beta),
            _ => return Err(ConfigError("give exactly one of --rho and --beta".into())),
        }
        .map_err(|e| ConfigError(e.to_string()))?;
        match ra {
            Some(ra) => p.with_rational(ra).map_err(|e| ConfigError(e.to_string())),
            None => Ok(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScale {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: GridScale,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                if i + 1 == self.count {
                    return self.stop;
                }
                match self.scale {
                    _ if i == 0 => self.start,
                    GridScale::Lin => self.start + (self.stop - self.start) * t,
                    GridScale::Log => (self.start.ln() + (self.stop / self.start).ln() * t).exp(),
                }
            })
            .collect()
    }
}

/// `start:stop:count:lin|log`; the scale may be omitted and defaults to `lin`.
pub fn parse_grid(s: &str) -> Result<Grid, ConfigError> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(parts.len() == 3 || parts.len() == 4) {
        return Err(ConfigError(format!(
            "grid '{s}' is not start:stop:count[:lin|log]"
        )));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| ConfigError(format!("bad number '{t}' in grid")))
    };
    let (start, stop) = (num(parts[0])?, num(parts[1])?);
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("bad count '{}' in grid", parts[2])))?;
    let scale = match parts.get(3).map(|t| t.trim()) {
        None | Some("lin") => GridScale::Lin,
        Some("log") => GridScale::Log,
        Some(other) => return Err(ConfigError(format!("unknown grid scale '{other}'"))),
    };
    if count == 0 {
        return Err(ConfigError("grid count must be at least 1".into()));
    }
    if !(start.is_finite() && stop.is_finite()) {
        return Err(ConfigError("grid ends must be finite".into()));
    }
    if scale == GridScale::Log && !(start > 0.0 && stop > 0.0) {
        return Err(ConfigError("a log grid needs positive ends".into()));
    }
    Ok(Grid {
        start,
        stop,
        count,
        scale,
    })
}

/// Points from either a single value or a grid.
pub fn points(
    single: Option<f64>,
    grid: Option<&str>,
    name: &str,
) -> Result<Vec<f64>, ConfigError> {
    match (single, grid) {
        (Some(v), None) => Ok(vec![v]),
        (None, Some(g)) => Ok(parse_grid(g)?.points()),
        _ => Err(ConfigError(format!("give either --{name} or --grid"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_alpha() {
        let (v, ra) = parse_alpha("3/2").unwrap();
        assert_eq!(v, 1.5);
        assert_eq!(ra.map(|r| (r.m(), r.n())), Some((3, 2)));
        assert_eq!(parse_alpha("1.5").unwrap(), (1.5, None));
        assert!(parse_alpha("3/0").is_err());
        assert!(parse_alpha("x").is_err());
        assert_eq!(parse_real("2/3").unwrap(), 2.0 / 3.0);
        assert_eq!(parse_real("-0.5").unwrap(), -0.5);
        assert!(parse_real("a/3").is_err());
    }

    #[test]
    fn grids() {
        let g = parse_grid("0.1:10:3:log").unwrap().points();
        assert!((g[1] - 1.0).abs() < 1e-15 && g[2] == 10.0);
        assert_eq!(
            parse_grid("0:1:5").unwrap().points(),
            vec![0.0, 0.25, 0.5, 0.75, 1.0]
        );
        assert_eq!(parse_grid("2:3:1:lin").unwrap().points(), vec![2.0]);
        assert!(parse_grid("0:1:0").is_err());
        assert!(parse_grid("0:1:5:log").is_err());
        assert!(parse_grid("0:1").is_err());
    }
}
