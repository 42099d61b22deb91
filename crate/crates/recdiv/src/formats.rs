//! Input formats: numbers, polynomial literals, and the JSON files for
//! recurrences, problems, finite-field instances and sieve systems.
//!
//! Integers that may exceed 64 bits are written as decimal strings; plain
//! JSON integers are accepted on input as well.

use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use recdiv_core::arith::{field_make, FiniteField};
use recdiv_core::ffzeros::SparseInstance;
use recdiv_core::poly::IntPolynomial;
use recdiv_core::recurrence::{CompanionRecurrence, ExpPolyRecurrence, ExpTerm, Recurrence};
use recdiv_core::sieve::{Exclusion, ExclusionReason, InvertedSource, SievePrime, SieveSystem};

use crate::cli::CliError;

/// An exact integer, serialized as a decimal string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Str(String),
            Num(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Num(n) => Ok(Int(BigInt::from(n))),
            Raw::Str(s) => s
                .trim()
                .parse()
                .map(Int)
                .map_err(|_| serde::de::Error::custom(format!("invalid integer {s:?}"))),
        }
    }
}

pub fn ints(values: &[BigInt]) -> Vec<Int> {
    values.iter().cloned().map(Int).collect()
}

fn bigints(values: &[Int]) -> Vec<BigInt> {
    values.iter().map(|i| i.0.clone()).collect()
}

/// Polynomial as a low-to-high coefficient list.
pub fn poly_json(p: &IntPolynomial) -> Vec<Int> {
    ints(p.coeffs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub poly: Vec<Int>,
    pub root: i64,
}

/// `{"companion": {"coeffs": [..], "init": [..]}}` or
/// `{"exppoly": [{"poly": [..], "root": a}, ..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum RecurrenceJson {
    Companion { coeffs: Vec<Int>, init: Vec<Int> },
    Exppoly(Vec<TermJson>),
}

impl RecurrenceJson {
    pub fn from_recurrence(r: &Recurrence) -> Self {
        match r {
            Recurrence::Companion(c) => RecurrenceJson::Companion {
                coeffs: ints(c.coeffs()),
                init: ints(c.init()),
            },
            Recurrence::ExpPoly { terms, .. } => RecurrenceJson::Exppoly(
                terms
                    .terms()
                    .iter()
                    .map(|t| TermJson {
                        poly: poly_json(&t.poly),
                        root: t.root,
                    })
                    .collect(),
            ),
        }
    }

    pub fn to_recurrence(&self) -> recdiv_core::Result<Recurrence> {
        Ok(match self {
            RecurrenceJson::Companion { coeffs, init } => {
                CompanionRecurrence::new(bigints(coeffs), bigints(init))?.into()
            }
            RecurrenceJson::Exppoly(terms) => ExpPolyRecurrence::new(
                terms
                    .iter()
                    .map(|t| ExpTerm {
                        poly: IntPolynomial::new(bigints(&t.poly)),
                        root: t.root,
                    })
                    .collect(),
            )?
            .into(),
        })
    }
}

/// `{"F": <recurrence>, "G": [..] or "x", "invert_primes": [..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    #[serde(rename = "F")]
    pub f: RecurrenceJson,
    #[serde(rename = "G")]
    pub g: PolyJson,
    #[serde(default)]
    pub invert_primes: Vec<u64>,
}

/// A polynomial as a coefficient list, low to high, or the string `"x"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyJson {
    Coeffs(Vec<Int>),
    Text(String),
}

impl PolyJson {
    pub fn to_poly(&self) -> Result<IntPolynomial, String> {
        match self {
            PolyJson::Coeffs(c) => Ok(IntPolynomial::new(bigints(c))),
            PolyJson::Text(t) => parse_poly(t),
        }
    }
}

/// `{"p": .., "k": .., "c": [[..]], "a": [[..]]}` with field elements as
/// coefficient vectors over `F_p`. For `k > 1` the field modulus is either
/// given or drawn from `seed` (default 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FfInstanceJson {
    pub p: u64,
    pub k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub c: Vec<Vec<u64>>,
    pub a: Vec<Vec<u64>>,
}

impl FfInstanceJson {
    pub fn to_instance(&self) -> recdiv_core::Result<SparseInstance> {
        let field: FiniteField = match &self.modulus {
            Some(m) => FiniteField::with_modulus(self.p, m.clone(), self.seed)?,
            None => field_make(self.p, self.k, self.seed.unwrap_or(0))?,
        };
        if field.degree() != self.k {
            return Err(recdiv_core::Error::Domain(format!(
                "modulus has degree {} but k = {}",
                field.degree(),
                self.k
            )));
        }
        let elems = |v: &[Vec<u64>]| -> recdiv_core::Result<Vec<_>> {
            v.iter().map(|c| field.element(c)).collect()
        };
        SparseInstance::new(field.clone(), elems(&self.c)?, elems(&self.a)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SievePrimeJson {
    pub p: u64,
    pub residues: Vec<u64>,
    pub order: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExclusionJson {
    pub p: u64,
    /// `in_s`, `identically_vanishing` or `small_order`.
    pub reason: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveSystemJson {
    pub y: u64,
    pub z: u64,
    pub gtilde: Vec<Int>,
    pub roots: Vec<i64>,
    pub invert_primes: Vec<u64>,
    pub primes: Vec<SievePrimeJson>,
    pub exclusions: Vec<ExclusionJson>,
}

fn source_name(s: InvertedSource) -> &'static str {
    match s {
        InvertedSource::User => "user",
        InvertedSource::RootDivisor => "root_divisor",
        InvertedSource::CommonRoot => "common_root",
    }
}

impl SieveSystemJson {
    pub fn from_system(s: &SieveSystem) -> Self {
        SieveSystemJson {
            y: s.y,
            z: s.z,
            gtilde: poly_json(&s.gtilde),
            roots: s.roots.clone(),
            invert_primes: s.invert_primes.clone(),
            primes: s
                .primes
                .iter()
                .map(|sp| SievePrimeJson {
                    p: sp.p,
                    residues: sp.residues.clone(),
                    order: sp.order,
                })
                .collect(),
            exclusions: s
                .exclusions
                .iter()
                .map(|e| match e.reason {
                    ExclusionReason::InS { source } => ExclusionJson {
                        p: e.p,
                        reason: "in_s".into(),
                        source: Some(source_name(source).into()),
                        order: None,
                    },
                    ExclusionReason::IdenticallyVanishing => ExclusionJson {
                        p: e.p,
                        reason: "identically_vanishing".into(),
                        source: None,
                        order: None,
                    },
                    ExclusionReason::SmallOrder { order } => ExclusionJson {
                        p: e.p,
                        reason: "small_order".into(),
                        source: None,
                        order: Some(order),
                    },
                })
                .collect(),
        }
    }

    /// Rebuilds the system and re-checks every residue and exclusion.
    pub fn to_system(&self) -> recdiv_core::Result<SieveSystem> {
        let bad = |m: String| recdiv_core::Error::Domain(m);
        let exclusions = self
            .exclusions
            .iter()
            .map(|e| {
                let reason = match (e.reason.as_str(), e.source.as_deref(), e.order) {
                    ("in_s", Some(src), None) => ExclusionReason::InS {
                        source: match src {
                            "user" => InvertedSource::User,
                            "root_divisor" => InvertedSource::RootDivisor,
                            "common_root" => InvertedSource::CommonRoot,
                            other => return Err(bad(format!("unknown source {other:?}"))),
                        },
                    },
                    ("identically_vanishing", None, None) => ExclusionReason::IdenticallyVanishing,
                    ("small_order", None, Some(order)) => ExclusionReason::SmallOrder { order },
                    _ => return Err(bad(format!("malformed exclusion of {}", e.p))),
                };
                Ok(Exclusion { p: e.p, reason })
            })
            .collect::<recdiv_core::Result<Vec<_>>>()?;
        let system = SieveSystem {
            y: self.y,
            z: self.z,
            gtilde: IntPolynomial::new(bigints(&self.gtilde)),
            roots: self.roots.clone(),
            invert_primes: self.invert_primes.clone(),
            primes: self
                .primes
                .iter()
                .map(|sp| SievePrime {
                    p: sp.p,
                    residues: sp.residues.clone(),
                    order: sp.order,
                })
                .collect(),
            exclusions,
        };
        if system.gtilde.is_constant() {
            return Err(bad("gtilde must be nonconstant".into()));
        }
        recdiv_core::sieve::check_roots(&system.roots)?;
        system.audit()?;
        Ok(system)
    }
}

/// Reads and parses a JSON file; parse errors carry line and column.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Input {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Nonnegative integer: `1000000`, `1_000_000`, `1e6`, `10^6`.
pub fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    let err = || format!("invalid count {s:?}");
    if let Some((m, e)) = t.split_once(['e', 'E']) {
        let m: u64 = m.parse().map_err(|_| err())?;
        let e: u32 = e.parse().map_err(|_| err())?;
        return 10u64.checked_pow(e).and_then(|p| p.checked_mul(m)).ok_or_else(err);
    }
    if let Some((b, e)) = t.split_once('^') {
        let b: u64 = b.parse().map_err(|_| err())?;
        let e: u32 = e.parse().map_err(|_| err())?;
        return b.checked_pow(e).ok_or_else(err);
    }
    t.parse().map_err(|_| err())
}

/// `x` (the identity), a comma list of integers low-to-high, or a JSON array.
pub fn parse_poly(s: &str) -> Result<IntPolynomial, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("x") {
        return Ok(IntPolynomial::x());
    }
    let coeffs: Vec<BigInt> = if t.starts_with('[') {
        let v: Vec<Int> = serde_json::from_str(t).map_err(|e| format!("polynomial {s:?}: {e}"))?;
        bigints(&v)
    } else {
        t.split(',')
            .map(|c| c.trim().parse::<BigInt>())
            .collect::<Result<_, _>>()
            .map_err(|_| format!("invalid polynomial {s:?}"))?
    };
    let p = IntPolynomial::new(coeffs);
    if p.is_zero() {
        return Err("the polynomial is zero".into());
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("10^4"), Ok(10_000));
        assert_eq!(parse_count("2^12"), Ok(4096));
        assert_eq!(parse_count("1_000"), Ok(1000));
        assert!(parse_count("1e30").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn polys() {
        assert_eq!(parse_poly("x").unwrap(), IntPolynomial::x());
        assert_eq!(parse_poly("1,0,1").unwrap(), IntPolynomial::from_i64s(&[1, 0, 1]));
        assert_eq!(parse_poly(r#"["1", 0, "1"]"#).unwrap(), IntPolynomial::from_i64s(&[1, 0, 1]));
        assert!(parse_poly("0").is_err());
        assert!(parse_poly("1,a").is_err());
    }

    #[test]
    fn recurrence_round_trip() {
        let text = r#"{"exppoly": [{"poly": ["2"], "root": 2}, {"poly": [-2], "root": 1}]}"#;
        let r: RecurrenceJson = serde_json::from_str(text).unwrap();
        let rec = r.to_recurrence().unwrap();
        assert_eq!(rec.eval_exact(3), BigInt::from(14));
        let back = RecurrenceJson::from_recurrence(&rec);
        assert_eq!(back.to_recurrence().unwrap(), rec);
        let text = r#"{"companion": {"coeffs": ["1", "1"], "init": ["0", "1"]}}"#;
        let r: RecurrenceJson = serde_json::from_str(text).unwrap();
        assert_eq!(r.to_recurrence().unwrap().eval_exact(10), BigInt::from(55));
    }

    #[test]
    fn sieve_system_round_trip() {
        let s = SieveSystem::build(&IntPolynomial::from_i64s(&[1, 0, 1]), &[2], &[3], 1, 300).unwrap();
        let json = serde_json::to_string(&SieveSystemJson::from_system(&s)).unwrap();
        let back: SieveSystemJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_system().unwrap(), s);
        // a tampered residue fails the audit
        let mut bad = back.clone();
        bad.primes[0].residues[0] += 1;
        assert!(bad.to_system().is_err());
    }

    #[test]
    fn ff_instance() {
        let j: FfInstanceJson =
            serde_json::from_str(r#"{"p": 7, "k": 1, "c": [[1], [6]], "a": [[3], [2]]}"#).unwrap();
        let inst = j.to_instance().unwrap();
        assert_eq!(inst.r(), 2);
        let j: FfInstanceJson =
            serde_json::from_str(r#"{"p": 2, "k": 3, "modulus": [1, 1, 0, 1], "c": [[1]], "a": [[0, 1]]}"#)
                .unwrap();
        assert_eq!(j.to_instance().unwrap().field().order(), 8);
    }

    proptest::proptest! {
        #[test]
        fn count_notations_agree(m in 1u64..1000, e in 0u32..10) {
            let v = m * 10u64.pow(e);
            proptest::prop_assert_eq!(parse_count(&format!("{m}e{e}")), Ok(v));
            proptest::prop_assert_eq!(parse_count(&v.to_string()), Ok(v));
            if m == 10 {
                proptest::prop_assert_eq!(parse_count(&format!("10^{}", e + 1)), Ok(v));
            }
        }

        #[test]
        fn poly_text_and_json_agree(c in proptest::collection::vec(-10_000i64..10_000, 1..6)) {
            proptest::prop_assume!(c.iter().any(|&v| v != 0));
            let text: Vec<String> = c.iter().map(i64::to_string).collect();
            let a = parse_poly(&text.join(",")).unwrap();
            let b = parse_poly(&format!("[{}]", text.join(", "))).unwrap();
            proptest::prop_assert_eq!(&a, &IntPolynomial::from_i64s(&c));
            proptest::prop_assert_eq!(&a, &b);
            let back: Vec<Int> = serde_json::from_str(&serde_json::to_string(&poly_json(&a)).unwrap()).unwrap();
            proptest::prop_assert_eq!(IntPolynomial::new(bigints(&back)), a);
        }
    }
}
