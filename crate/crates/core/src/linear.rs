//! Exact feasibility of small systems of strict and non-strict linear
//! inequalities by Fourier–Motzkin elimination.
//!
//! Every row is normalized to `a·x < b` or `a·x ≤ b`. Eliminating a variable
//! combines each row where it has a positive coefficient with each row where
//! it has a negative one; the combination is strict iff either parent is.
//! Rows with proportional left-hand sides are merged keeping the tightest
//! bound. A feasible system is solved by back-substitution, placing each
//! variable at the midpoint of its final interval.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Variable-count guard for [`feasible`].
pub const MAX_VARIABLES: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("system has {0} variables; at most {MAX_VARIABLES} are supported")]
    TooManyVariables(usize),
    #[error("row {row} has {found} coefficients, expected {expected}")]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("back-substituted point violates row {0}")]
    Unverified(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Gt,
    Ge,
    Le,
    Lt,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        }
    }

    pub fn holds(self, lhs: &BigRational, rhs: &BigRational) -> bool {
        match self {
            Relation::Gt => lhs > rhs,
            Relation::Ge => lhs >= rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
            Relation::Eq => lhs == rhs,
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl Serialize for Relation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for Relation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(match s.as_str() {
            ">" => Relation::Gt,
            ">=" => Relation::Ge,
            "<=" => Relation::Le,
            "<" => Relation::Lt,
            "=" => Relation::Eq,
            other => {
                return Err(serde::de::Error::custom(format!(
                    "unknown relation {other:?}"
                )))
            }
        })
    }
}

mod rational_str {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        s.parse()
            .map_err(|_| serde::de::Error::custom(format!("bad rational {s:?}")))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&r.to_string())?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| {
                    s.parse()
                        .map_err(|_| serde::de::Error::custom(format!("bad rational {s:?}")))
                })
                .collect()
        }
    }
}

/// One row `coeffs · x  rel  rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "rational_str::vec")]
    pub coeffs: Vec<BigRational>,
    pub rel: Relation,
    #[serde(with = "rational_str")]
    pub rhs: BigRational,
}

impl Constraint {
    pub fn new(coeffs: Vec<BigRational>, rel: Relation, rhs: BigRational) -> Self {
        Constraint { coeffs, rel, rhs }
    }

    pub fn lhs_at(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .zip(x)
            .fold(BigRational::zero(), |acc, (a, v)| acc + a * v)
    }

    pub fn satisfied_by(&self, x: &[BigRational]) -> bool {
        self.rel.holds(&self.lhs_at(x), &self.rhs)
    }

    /// Upper-bound form(s): `a·x < b` or `a·x ≤ b`.
    fn normalized(&self) -> Vec<Ineq> {
        let neg = |v: &[BigRational]| v.iter().map(|c| -c).collect::<Vec<_>>();
        match self.rel {
            Relation::Lt => vec![Ineq::new(self.coeffs.clone(), self.rhs.clone(), true)],
            Relation::Le => vec![Ineq::new(self.coeffs.clone(), self.rhs.clone(), false)],
            Relation::Gt => vec![Ineq::new(neg(&self.coeffs), -&self.rhs, true)],
            Relation::Ge => vec![Ineq::new(neg(&self.coeffs), -&self.rhs, false)],
            Relation::Eq => vec![
                Ineq::new(self.coeffs.clone(), self.rhs.clone(), false),
                Ineq::new(neg(&self.coeffs), -&self.rhs, false),
            ],
        }
    }
}

/// A finite conjunction of linear constraints over `num_vars` rational
/// variables. Serializes as a bare list of rows.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinearSystem {
    num_vars: usize,
    rows: Vec<Constraint>,
}

impl LinearSystem {
    pub fn new(num_vars: usize) -> Self {
        LinearSystem {
            num_vars,
            rows: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    pub fn push(&mut self, row: Constraint) -> Result<(), FeasibilityError> {
        if row.coeffs.len() != self.num_vars {
            return Err(FeasibilityError::RowLength {
                row: self.rows.len(),
                found: row.coeffs.len(),
                expected: self.num_vars,
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn from_rows(num_vars: usize, rows: Vec<Constraint>) -> Result<Self, FeasibilityError> {
        let mut sys = LinearSystem::new(num_vars);
        for r in rows {
            sys.push(r)?;
        }
        Ok(sys)
    }

    /// Index of the first row not satisfied by `x`.
    pub fn first_violated(&self, x: &[BigRational]) -> Option<usize> {
        self.rows.iter().position(|r| !r.satisfied_by(x))
    }

    /// Whether nonnegative multipliers on the rows (each row read in its
    /// upper-bound form `a·x < b` / `a·x ≤ b`) sum to `0 < 0`, `0 ≤ b` with
    /// `b < 0`, or `0 < b` with `b ≤ 0`. Equality rows are not accepted.
    pub fn is_infeasibility_certificate(&self, multipliers: &[(usize, BigRational)]) -> bool {
        let mut coeffs = vec![BigRational::zero(); self.num_vars];
        let mut rhs = BigRational::zero();
        let mut strict = false;
        for (i, lambda) in multipliers {
            let Some(row) = self.rows.get(*i) else {
                return false;
            };
            if lambda.is_negative() || row.rel == Relation::Eq {
                return false;
            }
            if lambda.is_zero() {
                continue;
            }
            let ineq = &row.normalized()[0];
            for (c, a) in coeffs.iter_mut().zip(&ineq.coeffs) {
                *c += a * lambda;
            }
            rhs += &ineq.rhs * lambda;
            strict |= ineq.strict;
        }
        coeffs.iter().all(Zero::is_zero) && (rhs.is_negative() || (strict && rhs.is_zero()))
    }
}

impl Serialize for LinearSystem {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LinearSystem {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Constraint>::deserialize(deserializer)?;
        let num_vars = rows.first().map_or(0, |r| r.coeffs.len());
        LinearSystem::from_rows(num_vars, rows).map_err(serde::de::Error::custom)
    }
}

/// Set of input rows a derived row was combined from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct History(Vec<u64>);

impl History {
    fn single(i: usize) -> Self {
        let mut words = vec![0u64; i / 64 + 1];
        words[i / 64] |= 1 << (i % 64);
        History(words)
    }

    fn union(&self, other: &History) -> History {
        let (long, short) = if self.0.len() >= other.0.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut words = long.0.clone();
        for (w, o) in words.iter_mut().zip(&short.0) {
            *w |= o;
        }
        History(words)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// `coeffs · x < rhs` (strict) or `≤ rhs`.
#[derive(Debug, Clone)]
struct Ineq {
    coeffs: Vec<BigRational>,
    rhs: BigRational,
    strict: bool,
    history: History,
}

impl Ineq {
    fn new(coeffs: Vec<BigRational>, rhs: BigRational, strict: bool) -> Self {
        Ineq {
            coeffs,
            rhs,
            strict,
            history: History::default(),
        }
    }

    /// Scales so the first nonzero coefficient has absolute value 1.
    fn normalize(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            if !lead.is_one() {
                for c in self.coeffs.iter_mut() {
                    *c /= &lead;
                }
                self.rhs /= &lead;
            }
        }
        self
    }

    fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// For a row with no variables: does it hold?
    fn trivially_holds(&self) -> bool {
        if self.strict {
            self.rhs.is_positive()
        } else {
            !self.rhs.is_negative()
        }
    }

    fn tighter_than(&self, other: &Ineq) -> bool {
        use std::cmp::Ordering::*;
        match (self.rhs.cmp(&other.rhs), self.strict.cmp(&other.strict)) {
            (Less, _) => true,
            (Equal, Greater) => true,
            (Equal, Equal) => self.history.len() < other.history.len(),
            _ => false,
        }
    }
}

/// Deduplicates proportional rows and drops satisfied constant rows. Returns
/// `None` if some constant row is violated.
fn simplify(rows: Vec<Ineq>) -> Option<Vec<Ineq>> {
    let mut index: HashMap<Vec<BigRational>, usize> = HashMap::new();
    let mut out: Vec<Ineq> = Vec::new();
    for row in rows {
        if row.is_trivial() {
            if !row.trivially_holds() {
                return None;
            }
            continue;
        }
        let row = row.normalize();
        match index.get(&row.coeffs) {
            Some(&i) => {
                if row.tighter_than(&out[i]) {
                    out[i] = row;
                }
            }
            None => {
                index.insert(row.coeffs.clone(), out.len());
                out.push(row);
            }
        }
    }
    Some(out)
}

struct Stage {
    var: usize,
    rows: Vec<Ineq>,
}

/// Decides feasibility exactly. On success returns a point satisfying every
/// row of `sys`; the point is re-verified before it is returned.
pub fn feasible(sys: &LinearSystem) -> Result<Option<Vec<BigRational>>, FeasibilityError> {
    let m = sys.num_vars;
    if m > MAX_VARIABLES {
        return Err(FeasibilityError::TooManyVariables(m));
    }
    let rows: Vec<Ineq> = sys
        .rows
        .iter()
        .flat_map(Constraint::normalized)
        .enumerate()
        .map(|(i, mut r)| {
            r.history = History::single(i);
            r
        })
        .collect();
    let Some(mut rows) = simplify(rows) else {
        return Ok(None);
    };

    let mut remaining: Vec<usize> = (0..m).collect();
    let mut stages = Vec::with_capacity(m);
    while !remaining.is_empty() {
        let eliminated = stages.len() + 1;
        // eliminate the variable producing the fewest new rows
        let (pick, &var) = remaining
            .iter()
            .enumerate()
            .min_by_key(|(_, &v)| {
                let pos = rows.iter().filter(|r| r.coeffs[v].is_positive()).count();
                let neg = rows.iter().filter(|r| r.coeffs[v].is_negative()).count();
                (pos * neg) as i64 - (pos + neg) as i64
            })
            .unwrap();
        remaining.swap_remove(pick);

        let (involved, rest): (Vec<Ineq>, Vec<Ineq>) =
            rows.into_iter().partition(|r| !r.coeffs[var].is_zero());
        let (upper, lower): (Vec<&Ineq>, Vec<&Ineq>) =
            involved.iter().partition(|r| r.coeffs[var].is_positive());
        let mut next = rest;
        for u in &upper {
            let su = BigRational::one() / &u.coeffs[var];
            for l in &lower {
                // a combination of more than `eliminated + 1` input rows is
                // implied by rows with smaller histories
                let history = u.history.union(&l.history);
                if history.len() > eliminated + 1 {
                    continue;
                }
                let sl = BigRational::one() / -&l.coeffs[var];
                let coeffs = u
                    .coeffs
                    .iter()
                    .zip(&l.coeffs)
                    .map(|(a, b)| a * &su + b * &sl)
                    .collect();
                next.push(Ineq {
                    coeffs,
                    rhs: &u.rhs * &su + &l.rhs * &sl,
                    strict: u.strict || l.strict,
                    history,
                });
            }
        }
        stages.push(Stage {
            var,
            rows: involved,
        });
        match simplify(next) {
            Some(r) => rows = r,
            None => return Ok(None),
        }
    }

    let mut x = vec![BigRational::zero(); m];
    for stage in stages.iter().rev() {
        x[stage.var] = choose_value(stage, &x);
    }
    if let Some(i) = sys.first_violated(&x) {
        return Err(FeasibilityError::Unverified(i));
    }
    Ok(Some(x))
}

fn choose_value(stage: &Stage, x: &[BigRational]) -> BigRational {
    let v = stage.var;
    let mut lo: Option<(BigRational, bool)> = None;
    let mut hi: Option<(BigRational, bool)> = None;
    for row in &stage.rows {
        let a = &row.coeffs[v];
        let others: BigRational = row
            .coeffs
            .iter()
            .zip(x)
            .enumerate()
            .filter(|(j, _)| *j != v)
            .fold(BigRational::zero(), |acc, (_, (c, xv))| acc + c * xv);
        let bound = (&row.rhs - others) / a;
        if a.is_positive() {
            if hi
                .as_ref()
                .is_none_or(|(h, s)| bound < *h || (bound == *h && row.strict && !s))
            {
                hi = Some((bound, row.strict));
            }
        } else if lo
            .as_ref()
            .is_none_or(|(l, s)| bound > *l || (bound == *l && row.strict && !s))
        {
            lo = Some((bound, row.strict));
        }
    }
    let two = BigRational::from_integer(BigInt::from(2));
    match (lo, hi) {
        (Some((l, _)), Some((h, _))) => (l + h) / two,
        (Some((l, _)), None) => l + BigRational::one(),
        (None, Some((h, _))) => h - BigRational::one(),
        (None, None) => BigRational::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eps::{integer, rational};

    fn row(coeffs: &[i64], rel: Relation, rhs: i64) -> Constraint {
        Constraint::new(
            coeffs.iter().map(|&c| integer(c)).collect(),
            rel,
            integer(rhs),
        )
    }

    #[test]
    fn contradictory_pair() {
        let sys = LinearSystem::from_rows(
            1,
            vec![row(&[1], Relation::Gt, 1), row(&[1], Relation::Le, 1)],
        )
        .unwrap();
        assert_eq!(feasible(&sys).unwrap(), None);
        let cert = vec![(0, integer(1)), (1, integer(1))];
        assert!(sys.is_infeasibility_certificate(&cert));
        assert!(!sys.is_infeasibility_certificate(&[(0, integer(1))]));
    }

    #[test]
    fn strictness_matters() {
        // x >= 1, x <= 1 is feasible; x > 1, x < 2 picks the midpoint
        let tight = LinearSystem::from_rows(
            1,
            vec![row(&[1], Relation::Ge, 1), row(&[1], Relation::Le, 1)],
        )
        .unwrap();
        assert_eq!(feasible(&tight).unwrap(), Some(vec![integer(1)]));
        let open = LinearSystem::from_rows(
            1,
            vec![row(&[1], Relation::Gt, 1), row(&[1], Relation::Lt, 2)],
        )
        .unwrap();
        assert_eq!(feasible(&open).unwrap(), Some(vec![rational(3, 2)]));
        let empty = LinearSystem::from_rows(
            1,
            vec![row(&[1], Relation::Gt, 1), row(&[1], Relation::Lt, 1)],
        )
        .unwrap();
        assert_eq!(feasible(&empty).unwrap(), None);
    }

    #[test]
    fn two_variable_triangle() {
        // x > 0, y > 0, x + y < 1
        let sys = LinearSystem::from_rows(
            2,
            vec![
                row(&[1, 0], Relation::Gt, 0),
                row(&[0, 1], Relation::Gt, 0),
                row(&[1, 1], Relation::Lt, 1),
            ],
        )
        .unwrap();
        let x = feasible(&sys).unwrap().unwrap();
        assert_eq!(sys.first_violated(&x), None);
        // add x + y > 1: infeasible
        let mut sys2 = sys.clone();
        sys2.push(row(&[1, 1], Relation::Gt, 1)).unwrap();
        assert_eq!(feasible(&sys2).unwrap(), None);
    }

    #[test]
    fn equalities_and_unbounded() {
        let sys = LinearSystem::from_rows(
            3,
            vec![
                row(&[1, -1, 0], Relation::Eq, 2),
                row(&[0, 1, 0], Relation::Ge, 5),
                row(&[0, 0, 1], Relation::Lt, -4),
            ],
        )
        .unwrap();
        let x = feasible(&sys).unwrap().unwrap();
        assert_eq!(sys.first_violated(&x), None);
        assert_eq!(
            feasible(&LinearSystem::new(2)).unwrap(),
            Some(vec![integer(0); 2])
        );
    }

    #[test]
    fn guards() {
        assert_eq!(
            feasible(&LinearSystem::new(13)),
            Err(FeasibilityError::TooManyVariables(13))
        );
        let mut sys = LinearSystem::new(2);
        assert!(matches!(
            sys.push(row(&[1], Relation::Lt, 0)),
            Err(FeasibilityError::RowLength { .. })
        ));
    }

    #[test]
    fn constant_rows() {
        let bad = LinearSystem::from_rows(1, vec![row(&[0], Relation::Gt, 0)]).unwrap();
        assert_eq!(feasible(&bad).unwrap(), None);
        let ok = LinearSystem::from_rows(1, vec![row(&[0], Relation::Ge, 0)]).unwrap();
        assert!(feasible(&ok).unwrap().is_some());
    }

    #[test]
    fn json_rows() {
        let sys = LinearSystem::from_rows(
            2,
            vec![Constraint::new(
                vec![rational(1, 2), integer(0)],
                Relation::Ge,
                integer(-1),
            )],
        )
        .unwrap();
        let json = serde_json::to_string(&sys).unwrap();
        assert_eq!(json, r#"[{"coeffs":["1/2","0"],"rel":">=","rhs":"-1"}]"#);
        assert_eq!(serde_json::from_str::<LinearSystem>(&json).unwrap(), sys);
    }
}
