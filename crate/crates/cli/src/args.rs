//! Command-line grammar.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Rational64;
use parafalc_core::field::{is_prime, prime_power, Field};
use serde::{Serialize, Serializer};

#[derive(Parser, Debug)]
#[command(name = "parafalc", version, about = "Parabolic distance sets over finite fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Distance profile, energies and bounds for one point set
    Analyze(AnalyzeArgs),
    /// Build an extremal construction, optionally checking its predictions
    Construct(ConstructArgs),
    /// Seeded soundness checks of the bounds on random sets
    Verify(VerifyArgs),
    /// Tightness table over a parameter grid
    Sweep(SweepArgs),
    /// Character-sum identities and inequalities
    AuditFourier(AuditArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Analyze(_) => "analyze",
            Command::Construct(_) => "construct",
            Command::Verify(_) => "verify",
            Command::Sweep(_) => "sweep",
            Command::AuditFourier(_) => "audit-fourier",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Analyze(a) => &a.common,
            Command::Construct(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Sweep(a) => &a.common,
            Command::AuditFourier(a) => &a.common,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Grid,
    Subspace,
    SharpnessGrid,
    SharpnessSubspace,
}

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Field as p[,n[,c0:c1:...:1]] or in the form p^n/[c0,...,1]
    #[arg(long)]
    pub field: Option<FieldSpec>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,
    /// Write the report here instead of standard output
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Permit field orders above the desk-scale limit
    #[arg(long)]
    pub allow_large: bool,
    /// Tolerance for unit-modulus and orthogonality checks
    #[arg(long)]
    pub tol_unit: Option<f64>,
    /// Relative tolerance for aggregated character sums
    #[arg(long)]
    pub tol_relative: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Point-set file
    #[arg(long, conflicts_with = "construction")]
    pub input: Option<PathBuf>,
    /// Analyze a construction instead of a file or random set
    #[arg(long, value_enum)]
    pub construction: Option<Kind>,
    #[arg(long)]
    pub eps: Option<Frac>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// Size of a random set
    #[arg(long)]
    pub size: Option<u64>,
    /// Largest fiber of a random set
    #[arg(long)]
    pub fiber_cap: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ConstructArgs {
    #[arg(value_enum)]
    pub kind: Kind,
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub eps: Option<Frac>,
    #[arg(long)]
    pub k: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// Exhaustively verify the predictions
    #[arg(long)]
    pub check: bool,
    /// Also write the point set in file format here
    #[arg(long)]
    #[serde(skip)]
    pub points_out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Field orders, comma separated
    #[arg(long)]
    pub q: Option<List<u64>>,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Fixed set size (default: drawn per trial from 2..=q²)
    #[arg(long)]
    pub size: Option<u64>,
    /// Fixed fiber cap (default: half the trials use a cap drawn from 1..=q)
    #[arg(long)]
    pub fiber_cap: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Sweep a construction over --p, --eps, --k, --m instead of random sets
    #[arg(long, value_enum)]
    pub construction: Option<Kind>,
    /// Field orders for random-set sweeps
    #[arg(long)]
    pub q: Option<List<u64>>,
    /// Primes for construction sweeps
    #[arg(long)]
    pub p: Option<List<u64>>,
    #[arg(long)]
    pub size: Option<List<u64>>,
    #[arg(long)]
    pub fiber_cap: Option<List<u64>>,
    #[arg(long)]
    pub eps: Option<List<Frac>>,
    #[arg(long)]
    pub k: Option<List<u64>>,
    #[arg(long)]
    pub m: Option<List<u64>>,
    /// Random sets per grid point
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct AuditArgs {
    #[command(flatten)]
    pub common: Common,
    /// Field orders, comma separated; empty means none
    #[arg(long)]
    pub q: Option<List<u64>>,
    /// Random functions per field for the Plancherel check
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    /// Random sets per field for the identity and inequality checks
    #[arg(long, default_value_t = 50)]
    pub sets: u64,
    /// Audit this point set instead of random ones
    #[arg(long)]
    pub input: Option<PathBuf>,
}

/// A rational entered as A/B (or an integer).
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Frac(pub Rational64);

impl FromStr for Frac {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let ok = !s.is_empty() && s.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-');
        if !ok {
            return Err(format!("{s:?} is not a rational A/B"));
        }
        Rational64::from_str(s).map(Frac).map_err(|_| format!("{s:?} is not a rational A/B"))
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for Frac {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Comma-separated values; the empty string is the empty list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<T>().map_err(|e| format!("{t:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

/// p[,n[,modulus]] as given on the command line, kept verbatim for echoing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub text: String,
    pub p: u64,
    pub n: Option<usize>,
    pub modulus: Option<Vec<u32>>,
}

impl FromStr for FieldSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.contains('^') {
            let f: Field = s.parse().map_err(|e| format!("{e}"))?;
            return Ok(FieldSpec {
                text: s.into(),
                p: f.characteristic() as u64,
                n: Some(f.degree()),
                modulus: Some(f.modulus().to_vec()),
            });
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() > 3 {
            return Err(format!("field {s:?}: expected p[,n[,modulus]]"));
        }
        let p = parts[0].parse::<u64>().map_err(|_| format!("field {s:?}: bad characteristic"))?;
        let n = match parts.get(1) {
            Some(t) => Some(t.parse::<usize>().map_err(|_| format!("field {s:?}: bad degree"))?),
            None => None,
        };
        let modulus = match parts.get(2) {
            Some(t) => Some(
                t.split(':')
                    .map(|c| c.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| format!("field {s:?}: modulus must be c0:c1:...:1"))?,
            ),
            None => None,
        };
        Ok(FieldSpec { text: s.into(), p, n, modulus })
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl FieldSpec {
    /// The field order, without building the field. A bare prime power is
    /// accepted as the order itself.
    pub fn order(&self) -> Option<u64> {
        match self.n {
            Some(n) => self.p.checked_pow(n as u32),
            None if is_prime(self.p) => Some(self.p),
            None => prime_power(self.p).map(|_| self.p),
        }
    }

    pub fn build(&self) -> parafalc_core::Result<Field> {
        match (self.n, &self.modulus) {
            (None, _) if !is_prime(self.p) && prime_power(self.p).is_some() => Field::with_order(self.p),
            (n, m) => Field::new(self.p, n.unwrap_or(1), m.clone()),
        }
    }

    /// The characteristic when the field is prime.
    pub fn prime(&self) -> Option<u64> {
        (self.n.unwrap_or(1) == 1 && self.modulus.is_none() && is_prime(self.p)).then_some(self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs() {
        let f: FieldSpec = "101".parse().unwrap();
        assert_eq!((f.p, f.n, f.order()), (101, None, Some(101)));
        let f: FieldSpec = "3,2,1:0:1".parse().unwrap();
        assert_eq!(f.build().unwrap().to_string(), "3^2/[1,0,1]");
        let f: FieldSpec = "3^2/[1,0,1]".parse().unwrap();
        assert_eq!(f.order(), Some(9));
        let f: FieldSpec = "81".parse().unwrap();
        assert_eq!(f.build().unwrap().order(), 81);
        assert!(f.prime().is_none());
        assert!("3,x".parse::<FieldSpec>().is_err());
        assert!("3,2,1:a".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn fractions_reject_decimals() {
        assert_eq!("1/2".parse::<Frac>().unwrap().0, Rational64::new(1, 2));
        assert_eq!("2/4".parse::<Frac>().unwrap().to_string(), "1/2");
        assert!("0.5".parse::<Frac>().is_err());
        assert!("1/0".parse::<Frac>().is_err());
    }

    #[test]
    fn lists() {
        assert_eq!("3,5, 7".parse::<List<u64>>().unwrap().0, vec![3, 5, 7]);
        assert!("".parse::<List<u64>>().unwrap().0.is_empty());
        assert!("3,x".parse::<List<u64>>().is_err());
    }
}
