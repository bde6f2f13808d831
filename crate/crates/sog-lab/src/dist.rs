//! Declarative algebra of scalar weight distributions.
//!
//! A [`DistributionSpec`] describes an edge- or vertex-weight law in closed
//! form: it can be sampled reproducibly from a keyed stream, and it reports
//! its moments exactly. Moment queries never fall back to numerical
//! estimation, so assumption checks are exact.

use crate::error::{Error, Result};
use crate::stream::StreamRng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum DistributionSpec {
    /// Point mass at `a`.
    Constant(f64),
    /// `scale` with probability `p`, else 0.
    Bernoulli { p: f64, scale: f64 },
    /// `a` with probability `pa`, `b` with probability `1 - pa`.
    TwoPoint { a: f64, pa: f64, b: f64 },
    /// Uniform on [a, b].
    Uniform { a: f64, b: f64 },
    /// Exponential with the given rate.
    Exponential { rate: f64 },
    /// Base law translated by `offset`.
    Shifted { base: Box<DistributionSpec>, offset: f64 },
    /// Sign-flipped base law.
    Negated(Box<DistributionSpec>),
}

/// Closed-form moments of a spec. `mean_pos_sq` is the second moment of the
/// positive part. Values may be infinite; they are never approximated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub mean_pos_sq: f64,
    pub var: f64,
    pub third_moment: f64,
}

/// Raw moments plus support bounds, used internally and by assumption checks.
#[derive(Debug, Clone, Copy)]
pub struct RawMoments {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub pos_sq: f64,
    pub support_min: f64,
    pub support_max: f64,
    /// True when P(X <= 0) > 0.
    pub mass_at_or_below_zero: bool,
}

fn finite(x: f64, name: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::parameter(name, "must be finite"))
    }
}

impl DistributionSpec {
    pub fn constant(a: f64) -> Self {
        DistributionSpec::Constant(a)
    }

    /// Validate parameters. Construction through the parser always validates.
    pub fn validate(&self) -> Result<()> {
        match self {
            DistributionSpec::Constant(a) => {
                finite(*a, "constant.a")?;
            }
            DistributionSpec::Bernoulli { p, scale } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::parameter("bernoulli.p", "must lie in [0,1]"));
                }
                finite(*scale, "bernoulli.scale")?;
            }
            DistributionSpec::TwoPoint { a, pa, b } => {
                if !(0.0..=1.0).contains(pa) {
                    return Err(Error::parameter("two_point.pa", "must lie in [0,1]"));
                }
                finite(*a, "two_point.a")?;
                finite(*b, "two_point.b")?;
            }
            DistributionSpec::Uniform { a, b } => {
                finite(*a, "uniform.a")?;
                finite(*b, "uniform.b")?;
                if a >= b {
                    return Err(Error::parameter("uniform", "requires a < b"));
                }
            }
            DistributionSpec::Exponential { rate } => {
                if !(*rate > 0.0) || !rate.is_finite() {
                    return Err(Error::parameter("exponential.rate", "must be positive and finite"));
                }
            }
            DistributionSpec::Shifted { base, offset } => {
                finite(*offset, "shifted.offset")?;
                base.validate()?;
            }
            DistributionSpec::Negated(base) => base.validate()?,
        }
        Ok(())
    }

    /// One variate; advances the stream deterministically.
    pub fn sample(&self, rng: &mut StreamRng) -> f64 {
        match self {
            DistributionSpec::Constant(a) => *a,
            DistributionSpec::Bernoulli { p, scale } => {
                if rng.bernoulli(*p) {
                    *scale
                } else {
                    0.0
                }
            }
            DistributionSpec::TwoPoint { a, pa, b } => {
                if rng.bernoulli(*pa) {
                    *a
                } else {
                    *b
                }
            }
            DistributionSpec::Uniform { a, b } => a + (b - a) * rng.next_f64(),
            DistributionSpec::Exponential { rate } => rng.exponential(*rate),
            DistributionSpec::Shifted { base, offset } => base.sample(rng) + offset,
            DistributionSpec::Negated(base) => -base.sample(rng),
        }
    }

    /// Exact raw moments and support information.
    pub fn raw_moments(&self) -> RawMoments {
        match self {
            DistributionSpec::Constant(a) => RawMoments {
                m1: *a,
                m2: a * a,
                m3: a * a * a,
                pos_sq: if *a > 0.0 { a * a } else { 0.0 },
                support_min: *a,
                support_max: *a,
                mass_at_or_below_zero: *a <= 0.0,
            },
            DistributionSpec::Bernoulli { p, scale } => {
                atoms_moments(&[(0.0, 1.0 - p), (*scale, *p)])
            }
            DistributionSpec::TwoPoint { a, pa, b } => {
                atoms_moments(&[(*a, *pa), (*b, 1.0 - pa)])
            }
            DistributionSpec::Uniform { a, b } => {
                let (a, b) = (*a, *b);
                let len = b - a;
                let m1 = (a + b) / 2.0;
                let m2 = (b * b * b - a * a * a) / (3.0 * len);
                let m3 = (b.powi(4) - a.powi(4)) / (4.0 * len);
                let pos_sq = if a >= 0.0 {
                    m2
                } else if b <= 0.0 {
                    0.0
                } else {
                    b * b * b / (3.0 * len)
                };
                RawMoments {
                    m1,
                    m2,
                    m3,
                    pos_sq,
                    support_min: a,
                    support_max: b,
                    mass_at_or_below_zero: a < 0.0,
                }
            }
            DistributionSpec::Exponential { rate } => {
                let r = *rate;
                RawMoments {
                    m1: 1.0 / r,
                    m2: 2.0 / (r * r),
                    m3: 6.0 / (r * r * r),
                    pos_sq: 2.0 / (r * r),
                    support_min: 0.0,
                    support_max: f64::INFINITY,
                    mass_at_or_below_zero: false, // P(X = 0) = 0
                }
            }
            DistributionSpec::Shifted { base, offset } => {
                let c = *offset;
                let rm = base.raw_moments();
                let m1 = rm.m1 + c;
                let m2 = rm.m2 + 2.0 * c * rm.m1 + c * c;
                let m3 = rm.m3 + 3.0 * c * rm.m2 + 3.0 * c * c * rm.m1 + c * c * c;
                let support_min = rm.support_min + c;
                let support_max = rm.support_max + c;
                let pos_sq = if support_min >= 0.0 {
                    m2
                } else if support_max <= 0.0 {
                    0.0
                } else {
                    shifted_pos_sq(base, c)
                };
                RawMoments {
                    m1,
                    m2,
                    m3,
                    pos_sq,
                    support_min,
                    support_max,
                    mass_at_or_below_zero: mass_at_or_below(self, 0.0),
                }
            }
            DistributionSpec::Negated(base) => {
                let rm = base.raw_moments();
                RawMoments {
                    m1: -rm.m1,
                    m2: rm.m2,
                    m3: -rm.m3,
                    // x^2 = (x+)^2 + (x-)^2, so E((-X)+)^2 = E X^2 - E(X+)^2
                    pos_sq: rm.m2 - rm.pos_sq,
                    support_min: -rm.support_max,
                    support_max: -rm.support_min,
                    mass_at_or_below_zero: mass_at_or_below(self, 0.0),
                }
            }
        }
    }

    /// Exact closed-form moments.
    pub fn moments(&self) -> Moments {
        let rm = self.raw_moments();
        Moments {
            mean: rm.m1,
            mean_pos_sq: rm.pos_sq,
            var: rm.m2 - rm.m1 * rm.m1,
            third_moment: rm.m3,
        }
    }

    /// Atom decomposition `(value, prob)` for purely discrete specs.
    pub fn atoms(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            DistributionSpec::Constant(a) => Some(vec![(*a, 1.0)]),
            DistributionSpec::Bernoulli { p, scale } => {
                Some(vec![(0.0, 1.0 - p), (*scale, *p)])
            }
            DistributionSpec::TwoPoint { a, pa, b } => Some(vec![(*a, *pa), (*b, 1.0 - pa)]),
            DistributionSpec::Shifted { base, offset } => base
                .atoms()
                .map(|v| v.into_iter().map(|(x, p)| (x + offset, p)).collect()),
            DistributionSpec::Negated(base) => base
                .atoms()
                .map(|v| v.into_iter().map(|(x, p)| (-x, p)).collect()),
            _ => None,
        }
    }

    /// CDF, exact for every kind in the algebra. Used by the fixed-point
    /// solver's quadrature of continuous laws.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            DistributionSpec::Constant(a) => {
                if x >= *a {
                    1.0
                } else {
                    0.0
                }
            }
            DistributionSpec::Bernoulli { p, scale } => {
                let mut acc = 0.0;
                for (v, q) in [(0.0, 1.0 - p), (*scale, *p)] {
                    if x >= v {
                        acc += q;
                    }
                }
                acc
            }
            DistributionSpec::TwoPoint { a, pa, b } => {
                let mut acc = 0.0;
                if x >= *a {
                    acc += pa;
                }
                if x >= *b {
                    acc += 1.0 - pa;
                }
                acc
            }
            DistributionSpec::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            DistributionSpec::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    1.0 - (-rate * x).exp()
                }
            }
            DistributionSpec::Shifted { base, offset } => base.cdf(x - offset),
            DistributionSpec::Negated(base) => {
                // P(-X <= x) = P(X >= -x) = 1 - P(X < -x); safe for the
                // continuous kinds, and atoms() covers the discrete ones.
                1.0 - base.cdf(-x) + base.prob_at(-x)
            }
        }
    }

    fn prob_at(&self, x: f64) -> f64 {
        match self.atoms() {
            Some(atoms) => atoms.iter().filter(|(v, _)| *v == x).map(|(_, p)| p).sum(),
            None => 0.0,
        }
    }

    pub fn support_min(&self) -> f64 {
        self.raw_moments().support_min
    }
}

fn atoms_moments(atoms: &[(f64, f64)]) -> RawMoments {
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut pos_sq = 0.0;
    let mut smin = f64::INFINITY;
    let mut smax = f64::NEG_INFINITY;
    let mut mass_le0 = false;
    for &(x, p) in atoms {
        if p <= 0.0 {
            continue;
        }
        m1 += p * x;
        m2 += p * x * x;
        m3 += p * x * x * x;
        if x > 0.0 {
            pos_sq += p * x * x;
        }
        smin = smin.min(x);
        smax = smax.max(x);
        if x <= 0.0 {
            mass_le0 = true;
        }
    }
    RawMoments {
        m1,
        m2,
        m3,
        pos_sq,
        support_min: smin,
        support_max: smax,
        mass_at_or_below_zero: mass_le0,
    }
}

/// E((X + c)^+)^2 when the shifted support straddles 0.
fn shifted_pos_sq(base: &DistributionSpec, c: f64) -> f64 {
    match base {
        DistributionSpec::Constant(_)
        | DistributionSpec::Bernoulli { .. }
        | DistributionSpec::TwoPoint { .. } => {
            let atoms: Vec<(f64, f64)> = base
                .atoms()
                .expect("discrete")
                .into_iter()
                .map(|(x, p)| (x + c, p))
                .collect();
            atoms_moments(&atoms).pos_sq
        }
        DistributionSpec::Uniform { a, b } => {
            DistributionSpec::Uniform { a: a + c, b: b + c }.raw_moments().pos_sq
        }
        DistributionSpec::Exponential { rate } => {
            // c < 0 here: E((c + X)^+)^2 = e^{rate*c} * 2 / rate^2
            (rate * c).exp() * 2.0 / (rate * rate)
        }
        DistributionSpec::Shifted { base: inner, offset } => shifted_pos_sq(inner, c + offset),
        DistributionSpec::Negated(inner) => {
            // (c - Y)^+ = (Y - c)^- ; use pos_sq of Y - c via the identity
            // E((Z)^-)^2 = E Z^2 - E(Z^+)^2 with Z = Y - c.
            let z = DistributionSpec::Shifted { base: inner.clone(), offset: -c };
            let rm = z.raw_moments();
            rm.m2 - rm.pos_sq
        }
    }
}

fn mass_at_or_below(spec: &DistributionSpec, x: f64) -> bool {
    if let Some(atoms) = spec.atoms() {
        return atoms.iter().any(|&(v, p)| p > 0.0 && v <= x);
    }
    match spec {
        DistributionSpec::Uniform { a, .. } => x > *a, // P(X <= a) = 0 at the endpoint
        DistributionSpec::Exponential { .. } => false,
        DistributionSpec::Shifted { base, offset } => mass_at_or_below(base, x - offset),
        DistributionSpec::Negated(base) => mass_strictly_above_exists(base, -x),
        _ => unreachable!("discrete kinds handled by atoms()"),
    }
}

fn mass_strictly_above_exists(spec: &DistributionSpec, x: f64) -> bool {
    // P(X >= x) > 0, with P(X = x) = 0 for continuous kinds.
    if let Some(atoms) = spec.atoms() {
        return atoms.iter().any(|&(v, p)| p > 0.0 && v >= x);
    }
    match spec {
        DistributionSpec::Uniform { a: _, b } => *b > x,
        DistributionSpec::Exponential { .. } => true,
        DistributionSpec::Shifted { base, offset } => mass_strictly_above_exists(base, x - offset),
        DistributionSpec::Negated(base) => mass_at_or_below(base, -x),
        _ => unreachable!(),
    }
}

// ---------------------------------------------------------------------------
// Assumption checks

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssumptionSet {
    A,
    B,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolatedClause {
    pub clause: String,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub assumption_set: AssumptionSet,
    pub satisfied: bool,
    pub violated_clauses: Vec<ViolatedClause>,
}

/// Exact clause-by-clause evaluation of the moment/support assumptions.
/// Failures are data, not errors.
pub fn check_assumptions(
    du: &DistributionSpec,
    dv: &DistributionSpec,
    which: AssumptionSet,
) -> AssumptionReport {
    let u = du.raw_moments();
    let v = dv.raw_moments();
    let mut violated = Vec::new();
    let mut fail = |clause: &str, value: f64| {
        violated.push(ViolatedClause { clause: clause.to_string(), value });
    };
    match which {
        AssumptionSet::A => {
            if v.support_min < 0.0 {
                fail("v_nonnegative", v.support_min);
            }
            if !v.m1.is_finite() {
                fail("v_mean_finite", v.m1);
            }
            if !(u.m1 > 0.0) {
                fail("u_mean_positive", u.m1);
            }
            if !u.pos_sq.is_finite() {
                fail("u_pos_part_second_moment_finite", u.pos_sq);
            }
        }
        AssumptionSet::B => {
            if u.support_min < 0.0 {
                fail("u_nonnegative", u.support_min);
            }
            if v.support_min < 0.0 {
                fail("v_nonnegative", v.support_min);
            }
            if !v.m2.is_finite() {
                fail("v_second_moment_finite", v.m2);
            }
            if !(u.m1 > 0.0) {
                fail("u_mean_positive", u.m1);
            }
            if !u.m3.is_finite() {
                fail("u_third_moment_finite", u.m3);
            }
        }
    }
    AssumptionReport {
        assumption_set: which,
        satisfied: violated.is_empty(),
        violated_clauses: violated,
    }
}

// ---------------------------------------------------------------------------
// Text grammar

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionSpec::Constant(a) => write!(f, "constant({a})"),
            DistributionSpec::Bernoulli { p, scale } => write!(f, "bernoulli({p},{scale})"),
            DistributionSpec::TwoPoint { a, pa, b } => {
                write!(f, "two_point({a},{pa};{b},{})", 1.0 - pa)
            }
            DistributionSpec::Uniform { a, b } => write!(f, "uniform({a},{b})"),
            DistributionSpec::Exponential { rate } => write!(f, "exponential({rate})"),
            DistributionSpec::Shifted { base, offset } => write!(f, "shifted({base},{offset})"),
            DistributionSpec::Negated(base) => write!(f, "negated({base})"),
        }
    }
}

impl From<DistributionSpec> for String {
    fn from(s: DistributionSpec) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for DistributionSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for DistributionSpec {
    type Err = Error;

    /// Grammar:
    ///   spec := constant(a) | bernoulli(p,scale) | two_point(a,pa;b,pb)
    ///         | uniform(a,b) | exponential(rate)
    ///         | shifted(spec,offset) | negated(spec)
    fn from_str(s: &str) -> Result<Self> {
        let spec = parse_spec(s.trim())?;
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_spec(s: &str) -> Result<DistributionSpec> {
    let open = s
        .find('(')
        .ok_or_else(|| Error::Parse(format!("expected `name(args)` in distribution spec `{s}`")))?;
    if !s.ends_with(')') {
        return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    let name = s[..open].trim();
    let args = &s[open + 1..s.len() - 1];
    let nums = |args: &str, want: usize, prod: &str| -> Result<Vec<f64>> {
        let vals: Result<Vec<f64>> = args
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("bad number `{t}` in `{prod}`")))
            })
            .collect();
        let vals = vals?;
        if vals.len() != want {
            return Err(Error::Parse(format!(
                "`{prod}` expects {want} numeric arguments, got {}",
                vals.len()
            )));
        }
        Ok(vals)
    };
    match name {
        "constant" => {
            let v = nums(args, 1, "constant")?;
            Ok(DistributionSpec::Constant(v[0]))
        }
        "bernoulli" => {
            let v = nums(args, 2, "bernoulli")?;
            Ok(DistributionSpec::Bernoulli { p: v[0], scale: v[1] })
        }
        "two_point" => {
            let parts: Vec<&str> = args.split(';').collect();
            if parts.len() != 2 {
                return Err(Error::Parse(
                    "`two_point` expects `a,pa;b,pb`".to_string(),
                ));
            }
            let left = nums(parts[0], 2, "two_point")?;
            let right = nums(parts[1], 2, "two_point")?;
            if (left[1] + right[1] - 1.0).abs() > 1e-12 {
                return Err(Error::Parse(format!(
                    "`two_point` probabilities must sum to 1, got {}",
                    left[1] + right[1]
                )));
            }
            Ok(DistributionSpec::TwoPoint { a: left[0], pa: left[1], b: right[0] })
        }
        "uniform" => {
            let v = nums(args, 2, "uniform")?;
            Ok(DistributionSpec::Uniform { a: v[0], b: v[1] })
        }
        "exponential" => {
            let v = nums(args, 1, "exponential")?;
            Ok(DistributionSpec::Exponential { rate: v[0] })
        }
        "shifted" => {
            let comma = split_top_level_comma(args).ok_or_else(|| {
                Error::Parse("`shifted` expects `shifted(spec,offset)`".to_string())
            })?;
            let base = parse_spec(args[..comma].trim())?;
            let offset = args[comma + 1..]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad offset in `{s}`")))?;
            Ok(DistributionSpec::Shifted { base: Box::new(base), offset })
        }
        "negated" => Ok(DistributionSpec::Negated(Box::new(parse_spec(args.trim())?))),
        other => Err(Error::Parse(format!(
            "unknown distribution `{other}` (expected constant, bernoulli, two_point, uniform, exponential, shifted, negated)"
        ))),
    }
}

/// Index of the last comma at nesting depth zero.
fn split_top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    let mut last = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => last = Some(i),
            _ => {}
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::StreamKey;

    fn spec(s: &str) -> DistributionSpec {
        s.parse().unwrap()
    }

    #[test]
    fn constant_moments() {
        let m = spec("constant(1)").moments();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.mean_pos_sq, 1.0);
        assert_eq!(m.var, 0.0);
    }

    #[test]
    fn exponential_moments_vs_samples() {
        let d = spec("exponential(1)");
        let m = d.moments();
        assert_eq!(m.mean, 1.0);
        assert_eq!(m.third_moment, 6.0);
        let mut rng = StreamKey::root(42).rng();
        let n = 1_000_000;
        let sum: f64 = (0..n).map(|_| d.sample(&mut rng)).sum();
        let emp = sum / n as f64;
        // sample std of exp(1) is 1
        assert!((emp - 1.0).abs() < 3.0 / (n as f64).sqrt(), "{emp}");
    }

    #[test]
    fn two_point_moments() {
        let m = spec("two_point(-5,0.5;6,0.5)").moments();
        assert_eq!(m.mean, 0.5);
        assert_eq!(m.mean_pos_sq, 18.0);
        // brute-force expectation over the two atoms
        let brute: f64 = [(-5.0f64, 0.5), (6.0, 0.5)]
            .iter()
            .map(|(x, p)| p * x.max(0.0).powi(2))
            .sum();
        assert_eq!(m.mean_pos_sq, brute);
    }

    #[test]
    fn sample_trivial_cases() {
        let mut rng = StreamKey::root(1).rng();
        assert_eq!(spec("constant(7)").sample(&mut rng), 7.0);
        assert_eq!(spec("bernoulli(1,3)").sample(&mut rng), 3.0);
    }

    #[test]
    fn empirical_mean_matches_moments() {
        for s in [
            "uniform(-1,3)",
            "exponential(2)",
            "two_point(-5,0.5;6,0.5)",
            "shifted(exponential(1),-0.5)",
            "negated(uniform(0,2))",
        ] {
            let d = spec(s);
            let m = d.moments();
            for n in [10_000usize, 1_000_000] {
                let mut rng = StreamKey::root(99).child(n as u64).rng();
                let sum: f64 = (0..n).map(|_| d.sample(&mut rng)).sum();
                let emp = sum / n as f64;
                let sd = m.var.sqrt();
                assert!(
                    (emp - m.mean).abs() < 4.0 * sd / (n as f64).sqrt(),
                    "{s} at n={n}: {emp} vs {}",
                    m.mean
                );
            }
        }
    }

    #[test]
    fn double_negation_samples_identically() {
        let d = spec("exponential(1)");
        let dd = DistributionSpec::Negated(Box::new(DistributionSpec::Negated(Box::new(
            d.clone(),
        ))));
        let mut r1 = StreamKey::root(5).rng();
        let mut r2 = StreamKey::root(5).rng();
        for _ in 0..100 {
            assert_eq!(d.sample(&mut r1), dd.sample(&mut r2));
        }
    }

    #[test]
    fn shifted_pos_sq_exponential() {
        // E((X - 0.5)^+)^2 for X ~ exp(2): e^{-1} * 2/4
        let d = spec("shifted(exponential(2),-0.5)");
        let got = d.moments().mean_pos_sq;
        let expect = (-1.0f64).exp() * 0.5;
        assert!((got - expect).abs() < 1e-12);
        // Monte Carlo cross-check
        let mut rng = StreamKey::root(8).rng();
        let n = 1_000_000;
        let emp: f64 = (0..n)
            .map(|_| d.sample(&mut rng).max(0.0).powi(2))
            .sum::<f64>()
            / n as f64;
        assert!((emp - expect).abs() < 0.01, "{emp} vs {expect}");
    }

    #[test]
    fn negated_shifted_pos_sq() {
        // (2 - X)^+ for X ~ exp(1); E((2-X)^+)^2 via MC against closed form path
        let d = spec("shifted(negated(exponential(1)),2)");
        let got = d.moments().mean_pos_sq;
        let mut rng = StreamKey::root(9).rng();
        let n = 2_000_000;
        let emp: f64 = (0..n)
            .map(|_| d.sample(&mut rng).max(0.0).powi(2))
            .sum::<f64>()
            / n as f64;
        assert!((emp - got).abs() < 0.01, "{emp} vs {got}");
    }

    #[test]
    fn assumptions_a() {
        let ok = check_assumptions(&spec("constant(1)"), &spec("constant(0)"), AssumptionSet::A);
        assert!(ok.satisfied);
        let ok = check_assumptions(
            &spec("two_point(-5,0.5;6,0.5)"),
            &spec("exponential(1)"),
            AssumptionSet::A,
        );
        assert!(ok.satisfied);
        let bad = check_assumptions(&spec("constant(-1)"), &spec("constant(0)"), AssumptionSet::A);
        assert!(!bad.satisfied);
        assert!(bad.violated_clauses.iter().any(|c| c.clause == "u_mean_positive"));
    }

    #[test]
    fn assumptions_b_rejects_signed_u() {
        let bad = check_assumptions(
            &spec("two_point(-5,0.5;6,0.5)"),
            &spec("constant(0)"),
            AssumptionSet::B,
        );
        assert!(!bad.satisfied);
    }

    #[test]
    fn parse_roundtrip() {
        for s in [
            "constant(1)",
            "two_point(-5,0.5;6,0.5)",
            "uniform(0,2)",
            "exponential(1)",
            "shifted(exponential(1),-0.5)",
            "negated(uniform(0,2))",
        ] {
            let d = spec(s);
            let d2: DistributionSpec = d.to_string().parse().unwrap();
            assert_eq!(d, d2);
        }
    }

    #[test]
    fn parse_errors() {
        assert!("gamma(1)".parse::<DistributionSpec>().is_err());
        assert!("uniform(2,1)".parse::<DistributionSpec>().is_err());
        assert!("two_point(1,0.7;2,0.7)".parse::<DistributionSpec>().is_err());
        assert!("exponential(0)".parse::<DistributionSpec>().is_err());
    }

    #[test]
    fn cdf_negated_exponential() {
        let d = spec("negated(exponential(1))");
        assert!((d.cdf(0.0) - 1.0).abs() < 1e-12);
        assert!((d.cdf(-1.0) - (-1.0f64).exp()).abs() < 1e-12);
    }
}
