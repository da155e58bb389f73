use rand::Rng;

use super::CurveModel;
use crate::arith::{mulmod, powmod};

/// Affine point on a short Weierstrass curve, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Point {
    Infinity,
    Affine(u64, u64),
}

/// `y^2 = x^3 + a x + b` over `F_p`, `p > 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShortCurve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

fn reduce_i128(v: i128, p: u64) -> u64 {
    v.rem_euclid(p as i128) as u64
}

impl ShortCurve {
    /// Short model `Y^2 = X^3 - 27 c4 X - 54 c6`, isomorphic over `F_p` for `p > 3`.
    pub fn from_model(curve: &CurveModel, p: u64) -> Self {
        assert!(p > 3, "short model needs p > 3");
        let (c4, c6) = curve.c_invariants();
        let c4 = reduce_i128(c4, p);
        let c6 = reduce_i128(c6, p);
        ShortCurve {
            p,
            a: mulmod(p - 27 % p, c4, p),
            b: mulmod(p - 54 % p, c6, p),
        }
    }

    fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        let x2 = mulmod(x, x, p);
        (mulmod(x2, x, p) + mulmod(self.a, x, p) + self.b) % p
    }

    pub fn contains(&self, pt: Point) -> bool {
        match pt {
            Point::Infinity => true,
            Point::Affine(x, y) => mulmod(y, y, self.p) == self.rhs(x),
        }
    }

    fn inv(&self, v: u64) -> u64 {
        powmod(v, self.p - 2, self.p)
    }

    pub fn neg(&self, pt: Point) -> Point {
        match pt {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => Point::Affine(x, (self.p - y) % self.p),
        }
    }

    pub fn add(&self, u: Point, v: Point) -> Point {
        let p = self.p;
        let (x1, y1, x2, y2) = match (u, v) {
            (Point::Infinity, _) => return v,
            (_, Point::Infinity) => return u,
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return Point::Infinity;
            }
            let num = (mulmod(3, mulmod(x1, x1, p), p) + self.a) % p;
            mulmod(num, self.inv(mulmod(2, y1, p)), p)
        } else {
            let num = (y2 + p - y1) % p;
            mulmod(num, self.inv((x2 + p - x1) % p), p)
        };
        let x3 = (mulmod(lambda, lambda, p) + 2 * p - x1 - x2) % p;
        let y3 = (mulmod(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
        Point::Affine(x3, y3)
    }

    pub fn mul(&self, pt: Point, mut k: u64) -> Point {
        let mut acc = Point::Infinity;
        let mut base = pt;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    /// Uniformly random x until the right-hand side is a square; the sign
    /// of y is random as well.
    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        let p = self.p;
        loop {
            let x = rng.gen_range(0..p);
            let r = self.rhs(x);
            if r == 0 {
                return Point::Affine(x, 0);
            }
            if let Some(y) = sqrt_mod(r, p) {
                let y = if rng.gen::<bool>() { y } else { p - y };
                return Point::Affine(x, y);
            }
        }
    }
}

/// Tonelli-Shanks square root of `a` modulo an odd prime `p`.
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if powmod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while powmod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod(z, q, p);
    let mut t = powmod(a, q, p);
    let mut r = powmod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mulmod(t2, t2, p);
            i += 1;
        }
        let b = powmod(c, 1 << (m - i - 1), p);
        m = i;
        c = mulmod(b, b, p);
        t = mulmod(t, c, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_roots() {
        for p in [7u64, 13, 17, 41, 97, 10_009, 1_000_000_007] {
            for a in 1..50u64 {
                if let Some(r) = sqrt_mod(a, p) {
                    assert_eq!(mulmod(r, r, p), a % p);
                }
            }
        }
        assert_eq!(sqrt_mod(3, 7), None);
    }

    #[test]
    fn group_law_on_random_points() {
        let e = CurveModel::new(0, 0, 1, -1, 0).unwrap();
        let c = ShortCurve::from_model(&e, 1009);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let u = c.random_point(&mut rng);
            let v = c.random_point(&mut rng);
            let w = c.random_point(&mut rng);
            assert!(c.contains(u));
            assert_eq!(c.add(u, v), c.add(v, u));
            assert_eq!(c.add(c.add(u, v), w), c.add(u, c.add(v, w)));
            assert_eq!(c.add(u, c.neg(u)), Point::Infinity);
            assert_eq!(c.mul(u, 5), c.add(c.mul(u, 2), c.mul(u, 3)));
        }
    }
}
