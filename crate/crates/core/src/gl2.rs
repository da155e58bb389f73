//! Counting inside `GL2(Z/nZ)`: the group order, the Frobenius-class set
//! `C(n) = {g : det g + 1 - tr g = 0 mod n}`, and
//! `Omega(m) = {g : gcd(det g + 1 - tr g, m) != 1}` for a full or
//! generator-specified image.
//!
//! Exhaustive counts group matrices by `(a, d)` and by the residue of `bc`,
//! which visits every matrix class exactly once in `O(n^3)` work.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, is_prime, squarefree_divisors};
use crate::{Error, Rational, Result};

/// Largest modulus accepted by the exhaustive counts.
pub const BRUTE_FORCE_CAP: u64 = 400;

/// Largest group materialized by [`subgroup_closure`].
pub const CLOSURE_CAP: usize = 10_000_000;

// Closure elements are packed into 16-bit lanes.
const PACK_LIMIT: u64 = 1 << 16;

/// A 2x2 matrix `[[a, b], [c, d]]` over `Z/nZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatrixModN {
    pub n: u64,
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl MatrixModN {
    pub fn new(n: u64, a: i64, b: i64, c: i64, d: i64) -> Self {
        assert!(n >= 1);
        let r = |v: i64| v.rem_euclid(n as i64) as u64;
        MatrixModN {
            n,
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        }
    }

    pub fn identity(n: u64) -> Self {
        MatrixModN::new(n, 1, 0, 0, 1)
    }

    pub fn det(&self) -> u64 {
        let n = self.n as u128;
        let ad = self.a as u128 * self.d as u128 % n;
        let bc = self.b as u128 * self.c as u128 % n;
        ((ad + n - bc) % n) as u64
    }

    pub fn trace(&self) -> u64 {
        (self.a + self.d) % self.n
    }

    /// `det + 1 - tr` reduced mod n.
    pub fn frobenius_residue(&self) -> u64 {
        (self.det() + 1 + self.n - self.trace()) % self.n
    }

    pub fn is_invertible(&self) -> bool {
        gcd(self.det(), self.n) == 1
    }

    pub fn mul(&self, o: &MatrixModN) -> MatrixModN {
        debug_assert_eq!(self.n, o.n);
        let n = self.n as u128;
        let dot = |x: u64, y: u64, z: u64, w: u64| {
            ((x as u128 * y as u128 + z as u128 * w as u128) % n) as u64
        };
        MatrixModN {
            n: self.n,
            a: dot(self.a, o.a, self.b, o.c),
            b: dot(self.a, o.b, self.b, o.d),
            c: dot(self.c, o.a, self.d, o.c),
            d: dot(self.c, o.b, self.d, o.d),
        }
    }

    fn pack(&self) -> u64 {
        self.a | self.b << 16 | self.c << 32 | self.d << 48
    }

    fn unpack(n: u64, v: u64) -> Self {
        let lane = |s: u32| (v >> s) & 0xffff;
        MatrixModN {
            n,
            a: lane(0),
            b: lane(16),
            c: lane(32),
            d: lane(48),
        }
    }

    /// Parses `"a,b;c,d"` with the modulus supplied separately.
    pub fn parse_with_modulus(s: &str, n: u64) -> Result<Self> {
        let bad = || Error::Parse(format!("matrix must look like \"a,b;c,d\", got {s:?}"));
        let rows: Vec<&str> = s.trim().split(';').collect();
        if rows.len() != 2 {
            return Err(bad());
        }
        let mut v = Vec::with_capacity(4);
        for row in rows {
            let cols: Vec<&str> = row.split(',').collect();
            if cols.len() != 2 {
                return Err(bad());
            }
            for c in cols {
                v.push(c.trim().parse::<i64>().map_err(|_| bad())?);
            }
        }
        Ok(MatrixModN::new(n, v[0], v[1], v[2], v[3]))
    }
}

impl fmt::Display for MatrixModN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{};{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Parses a generator list: one `"a,b;c,d"` matrix per line (or separated by
/// `|`), with blank lines and `#` comments ignored.
pub fn parse_generators(text: &str, modulus: u64) -> Result<Vec<MatrixModN>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split('|'))
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| MatrixModN::parse_with_modulus(l, modulus))
        .collect()
}

/// `|GL2(Z/nZ)| = prod over l^e || n of l^(4(e-1)) (l^2 - 1)(l^2 - l)`.
pub fn gl2_order(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::OutOfRange("modulus must be positive".into()));
    }
    let overflow = || Error::Overflow("|GL2(Z/nZ)|");
    let mut acc: u64 = 1;
    for &(l, e) in factorize(n).factors() {
        let local = l
            .checked_pow(4 * (e - 1))
            .and_then(|v| v.checked_mul(l.checked_mul(l)? - 1))
            .and_then(|v| v.checked_mul(l * l - l))
            .ok_or_else(overflow)?;
        acc = acc.checked_mul(local).ok_or_else(overflow)?;
    }
    Ok(acc)
}

/// Number of `g` in `GL2(Z/nZ)` whose `(det, tr)` satisfies `pred`.
fn count_matching<P>(n: u64, pred: P) -> u64
where
    P: Fn(u64, u64) -> bool + Sync,
{
    let nu = n as usize;
    let mut bc_count = vec![0u64; nu];
    for b in 0..n {
        for c in 0..n {
            bc_count[(b * c % n) as usize] += 1;
        }
    }
    let units: Vec<u64> = (0..n).filter(|&x| gcd(x, n) == 1).collect();
    (0..n)
        .into_par_iter()
        .map(|a| {
            let mut local = 0u64;
            for d in 0..n {
                let ad = a * d % n;
                let tr = (a + d) % n;
                for &det in &units {
                    if pred(det, tr) {
                        local += bc_count[((ad + n - det) % n) as usize];
                    }
                }
            }
            local
        })
        .sum()
}

fn check_cap(n: u64, cap: u64) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded(format!(
            "modulus {n} exceeds brute-force cap {cap}"
        )));
    }
    Ok(())
}

/// `|GL2(Z/nZ)|` by exhaustive count.
pub fn gl2_order_brute(n: u64, cap: u64) -> Result<u64> {
    check_cap(n, cap)?;
    Ok(count_matching(n, |_, _| true))
}

/// `|C(n)|` by exhaustive count over `GL2(Z/nZ)`.
pub fn count_c_brute(n: u64, cap: u64) -> Result<u64> {
    check_cap(n, cap)?;
    Ok(count_matching(n, |det, tr| (det + 1 + n - tr).is_multiple_of(n)))
}

/// `|C(n)|` for the full group: closed form when every prime occurs to
/// exponent at most 2, exhaustive count otherwise (within the cap).
pub fn count_c(n: u64) -> Result<u64> {
    match density_c(n) {
        Ok(dens) => {
            let order = gl2_order(n)? as i128;
            let v = dens * Rational::from_integer(order);
            debug_assert!(v.is_integer());
            u64::try_from(v.to_integer()).map_err(|_| Error::Overflow("|C(n)|"))
        }
        Err(Error::OutOfRange(_)) => count_c_brute(n, BRUTE_FORCE_CAP),
        Err(e) => Err(e),
    }
}

/// `|C(l)| / |GL2(Z/lZ)| = (l^2 - 2) / ((l - 1)(l^2 - 1))`.
pub fn density_c_prime(l: u64) -> Rational {
    debug_assert!(is_prime(l));
    let l = l as i128;
    Rational::new(l * l - 2, (l - 1) * (l * l - 1))
}

/// `|C(l^2)| / |GL2(Z/l^2 Z)| = (l^3 - l - 1) / (l^2 (l^2 - 1)(l - 1))`.
pub fn density_c_prime_squared(l: u64) -> Rational {
    debug_assert!(is_prime(l));
    let l = l as i128;
    Rational::new(l * l * l - l - 1, l * l * (l * l - 1) * (l - 1))
}

/// `|C(n)| / |GL2(Z/nZ)|` from the closed forms, multiplicative over
/// prime powers. `OutOfRange` when some exponent exceeds 2.
pub fn density_c(n: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::OutOfRange("modulus must be positive".into()));
    }
    let mut acc = Rational::one();
    for &(l, e) in factorize(n).factors() {
        let local = match e {
            1 => density_c_prime(l),
            2 => density_c_prime_squared(l),
            _ => {
                return Err(Error::OutOfRange(format!(
                    "no closed form for {l}^{e}"
                )))
            }
        };
        acc = acc
            .checked_mul(&local)
            .ok_or(Error::Overflow("density of C(n)"))?;
    }
    Ok(acc)
}

/// The group generated by `gens` (breadth-first closure).
pub fn subgroup_closure(gens: &[MatrixModN]) -> Result<Vec<MatrixModN>> {
    let Some(first) = gens.first() else {
        return Err(Error::InvalidConfig("empty generator list".into()));
    };
    let n = first.n;
    if gens.iter().any(|g| g.n != n) {
        return Err(Error::InvalidConfig("generators have different moduli".into()));
    }
    if let Some(g) = gens.iter().find(|g| !g.is_invertible()) {
        log::debug!("generator {g} is singular mod {n}");
        return Err(Error::NotInvertible(n));
    }
    if n >= PACK_LIMIT {
        return Err(Error::CapExceeded(format!(
            "closure modulus {n} is at least {PACK_LIMIT}"
        )));
    }
    let id = MatrixModN::identity(n);
    let mut seen: HashSet<u64> = HashSet::from([id.pack()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y.pack()) {
                if seen.len() > CLOSURE_CAP {
                    return Err(Error::CapExceeded(format!(
                        "closure larger than {CLOSURE_CAP} elements"
                    )));
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<MatrixModN> = seen.into_iter().map(|v| MatrixModN::unpack(n, v)).collect();
    out.sort_unstable();
    Ok(out)
}

/// How the mod-`M_E` image is specified.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImageMode {
    /// All of `GL2(Z/M_E Z)`.
    Full,
    /// The subgroup generated by these matrices mod `M_E`.
    Generators(Vec<MatrixModN>),
}

/// `|G(M_E)|` and `|Omega(M_E)|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageCounts {
    pub order: u64,
    pub omega: u64,
}

/// Serre's modulus `M_E` and the image `G(M_E)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaloisImageSpec {
    m_e: u64,
    mode: ImageMode,
    #[serde(skip)]
    cached: OnceLock<ImageCounts>,
}

impl PartialEq for GaloisImageSpec {
    fn eq(&self, o: &Self) -> bool {
        self.m_e == o.m_e && self.mode == o.mode
    }
}

impl GaloisImageSpec {
    pub fn full(m_e: u64) -> Result<Self> {
        if m_e == 0 {
            return Err(Error::OutOfRange("M_E must be positive".into()));
        }
        Ok(GaloisImageSpec {
            m_e,
            mode: ImageMode::Full,
            cached: OnceLock::new(),
        })
    }

    pub fn from_generators(m_e: u64, gens: Vec<MatrixModN>) -> Result<Self> {
        if m_e == 0 {
            return Err(Error::OutOfRange("M_E must be positive".into()));
        }
        if gens.is_empty() {
            return Err(Error::InvalidConfig("empty generator list".into()));
        }
        if gens.iter().any(|g| g.n != m_e) {
            return Err(Error::InvalidConfig(format!(
                "every generator must have modulus {m_e}"
            )));
        }
        if gens.iter().any(|g| !g.is_invertible()) {
            return Err(Error::NotInvertible(m_e));
        }
        Ok(GaloisImageSpec {
            m_e,
            mode: ImageMode::Generators(gens),
            cached: OnceLock::new(),
        })
    }

    pub fn m_e(&self) -> u64 {
        self.m_e
    }

    pub fn mode(&self) -> &ImageMode {
        &self.mode
    }

    /// Short label naming how the image was specified.
    pub fn label(&self) -> String {
        match &self.mode {
            ImageMode::Full => format!("full GL2(Z/{}Z)", self.m_e),
            ImageMode::Generators(g) => {
                format!("subgroup of GL2(Z/{}Z) generated by {} matrices", self.m_e, g.len())
            }
        }
    }

    /// `|G(M_E)|` and `|Omega(M_E)|`, computed once.
    pub fn counts(&self) -> Result<ImageCounts> {
        if let Some(c) = self.cached.get() {
            return Ok(*c);
        }
        let m = self.m_e;
        let counts = match &self.mode {
            ImageMode::Full => {
                check_cap(m, BRUTE_FORCE_CAP)?;
                let omega = count_matching(m, |det, tr| gcd((det + 1 + m - tr) % m, m) != 1);
                ImageCounts {
                    order: gl2_order(m)?,
                    omega,
                }
            }
            ImageMode::Generators(gens) => {
                let group = subgroup_closure(gens)?;
                let omega = group
                    .iter()
                    .filter(|g| gcd(g.frobenius_residue(), m) != 1)
                    .count() as u64;
                ImageCounts {
                    order: group.len() as u64,
                    omega,
                }
            }
        };
        Ok(*self.cached.get_or_init(|| counts))
    }
}

pub fn count_omega(image: &GaloisImageSpec) -> Result<u64> {
    Ok(image.counts()?.omega)
}

/// `1 - |Omega(M_E)| / |G(M_E)|`.
pub fn prob_coprime(image: &GaloisImageSpec) -> Result<Rational> {
    let c = image.counts()?;
    Ok(Rational::one() - Rational::new(c.omega as i128, c.order as i128))
}

/// `sum over d | M of mu(d) |C(d)| / |G(d)|` with both counts exhaustive,
/// over the squarefree divisors of `m`.
pub fn prob_coprime_inclusion_exclusion(m: u64) -> Result<Rational> {
    let mut acc = Rational::zero();
    for (d, mu) in squarefree_divisors(m) {
        let ratio = Rational::new(
            count_c_brute(d, BRUTE_FORCE_CAP)? as i128,
            gl2_order_brute(d, BRUTE_FORCE_CAP)? as i128,
        );
        acc = if mu > 0 {
            acc.checked_add(&ratio)
        } else {
            acc.checked_sub(&ratio)
        }
        .ok_or(Error::Overflow("inclusion-exclusion sum"))?;
    }
    Ok(acc)
}

impl FromStr for MatrixModN {
    type Err = Error;

    /// Parses `"n:a,b;c,d"`.
    fn from_str(s: &str) -> Result<Self> {
        let (n, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected \"n:a,b;c,d\", got {s:?}")))?;
        let n: u64 = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus {n:?}")))?;
        if n == 0 {
            return Err(Error::Parse("modulus must be positive".into()));
        }
        MatrixModN::parse_with_modulus(rest, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Plain n^4 scan, independent of the grouped count.
    fn scan(n: u64) -> (u64, u64) {
        let (mut g, mut c) = (0, 0);
        for a in 0..n {
            for b in 0..n {
                for cc in 0..n {
                    for d in 0..n {
                        let m = MatrixModN::new(n, a as i64, b as i64, cc as i64, d as i64);
                        if m.is_invertible() {
                            g += 1;
                            if m.frobenius_residue() == 0 {
                                c += 1;
                            }
                        }
                    }
                }
            }
        }
        (g, c)
    }

    #[test]
    fn orders() {
        assert_eq!(gl2_order(1), Ok(1));
        assert_eq!(gl2_order(2), Ok(6));
        assert_eq!(gl2_order(4), Ok(96));
        for n in 1..=12 {
            assert_eq!(gl2_order(n).unwrap(), scan(n).0, "n = {n}");
            assert_eq!(gl2_order_brute(n, BRUTE_FORCE_CAP).unwrap(), scan(n).0);
        }
        assert!(matches!(gl2_order(1 << 40), Err(Error::Overflow(_))));
    }

    #[test]
    fn c_counts_small() {
        assert_eq!(count_c_brute(1, 400), Ok(1));
        assert_eq!(count_c_brute(2, 400), Ok(4));
        for n in 1..=12 {
            assert_eq!(count_c_brute(n, 400).unwrap(), scan(n).1, "n = {n}");
        }
        assert_eq!(count_c(2), Ok(4));
        assert_eq!(count_c(4), Ok(40));
        // 8 = 2^3 has no closed form; falls back to the exhaustive count.
        assert_eq!(count_c(8).unwrap(), scan(8).1);
        assert!(matches!(count_c_brute(401, 400), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn closed_form_densities() {
        assert_eq!(density_c_prime(2), Rational::new(2, 3));
        assert_eq!(density_c_prime_squared(2), Rational::new(5, 12));
        assert_eq!(density_c_prime(3), Rational::new(7, 16));
        let l = 1_000_003u64;
        let scaled = density_c_prime(l) * Rational::from_integer(l as i128);
        let diff = scaled - Rational::one();
        assert!(diff > Rational::zero() && diff < Rational::new(2, l as i128));
    }

    #[test]
    fn closure_examples() {
        let id = MatrixModN::identity(5);
        assert_eq!(subgroup_closure(&[id]).unwrap(), vec![id]);
        let t = MatrixModN::new(3, 1, 1, 0, 1);
        assert_eq!(subgroup_closure(&[t]).unwrap().len(), 3);
        let all2: Vec<MatrixModN> = (0..16u64)
            .map(|v| MatrixModN::new(2, (v & 1) as i64, (v >> 1 & 1) as i64, (v >> 2 & 1) as i64, (v >> 3 & 1) as i64))
            .filter(MatrixModN::is_invertible)
            .collect();
        assert_eq!(subgroup_closure(&all2).unwrap().len(), 6);
        let singular = MatrixModN::new(4, 2, 0, 0, 1);
        assert_eq!(subgroup_closure(&[singular]), Err(Error::NotInvertible(4)));
    }

    #[test]
    fn image_probabilities() {
        let one = GaloisImageSpec::full(1).unwrap();
        assert_eq!(count_omega(&one), Ok(0));
        assert_eq!(prob_coprime(&one), Ok(Rational::one()));
        let two = GaloisImageSpec::full(2).unwrap();
        assert_eq!(count_omega(&two), Ok(4));
        assert_eq!(prob_coprime(&two), Ok(Rational::new(1, 3)));
        let gens = vec![MatrixModN::new(2, 1, 1, 0, 1), MatrixModN::new(2, 0, 1, 1, 0)];
        let by_gens = GaloisImageSpec::from_generators(2, gens).unwrap();
        assert_eq!(prob_coprime(&by_gens), prob_coprime(&two));
        assert!(matches!(
            GaloisImageSpec::full(401).unwrap().counts(),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn parsing() {
        let m = MatrixModN::parse_with_modulus(" 1, 2 ; -1, 4", 5).unwrap();
        assert_eq!((m.a, m.b, m.c, m.d), (1, 2, 4, 4));
        assert!(MatrixModN::parse_with_modulus("1,2,3,4", 5).is_err());
        let gens = parse_generators("1,1;0,1\n# comment\n\n0,1;1,0 | 1,0;0,2", 3).unwrap();
        assert_eq!(gens.len(), 3);
        let m: MatrixModN = "7:1,1;0,1".parse().unwrap();
        assert_eq!(m.n, 7);
        assert_eq!(m.to_string(), "1,1;0,1");
    }
}
