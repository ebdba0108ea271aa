//! Concrete elements: the standard generators of F, the periodic building
//! blocks, and the modified generating pair `X0(m, b)`, `X1(m, b)` together
//! with the word tower written over it.
//!
//! The modified pair agrees with `x0`, `x1` on a long initial interval,
//! follows a chain of `m` period-4 blocks on `[b, b+4m]`, and rejoins the
//! translation `t ↦ t+1` above `b+4m+3`. Those glueing constraints are
//! asserted when the pair is built, so a bad breakpoint table fails loudly
//! instead of producing a subtly wrong homeomorphism.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::plmap::{Interval, PLMap, Side};
use crate::words::{Alphabet, Word};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("m must be at least 2 (got {0})")]
    BlockCountTooSmall(u32),
    #[error("b must be a multiple of 4 that is at least 20 (got {0})")]
    BadOffset(u32),
    #[error("conjugation words X_i need i >= 2 (got {0})")]
    IndexTooSmall(u32),
}

/// Construction parameters: `m` period-4 blocks starting at `b`.
///
/// Derived values: ball radius `n = 2m−3`, conjugation depth `i = m+2`,
/// top of the block chain `u = b+4m`, and the rightmost fixed point
/// `xi = b+4m+2` of `X0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Params {
    m: u32,
    b: u32,
}

impl Params {
    pub fn new(m: u32, b: u32) -> Result<Self, ConstructError> {
        if m < 2 {
            return Err(ConstructError::BlockCountTooSmall(m));
        }
        // b >= 17 suffices for the support separation; the smallest multiple
        // of 4 above that is 20
        if b < 20 || !b.is_multiple_of(4) {
            return Err(ConstructError::BadOffset(b));
        }
        Ok(Params { m, b })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// No reduced word in the pair shorter than `n = 2m−3` is a relation.
    pub fn ball_radius(&self) -> u32 {
        2 * self.m - 3
    }

    /// The conjugation depth `i = m+2` used in the word tower.
    pub fn conj_depth(&self) -> u32 {
        self.m + 2
    }

    /// Top of the block chain, `u = b + 4m`.
    pub fn top(&self) -> u32 {
        self.b + 4 * self.m
    }

    /// Rightmost fixed point of `X0`: `xi = b + 4m + 2`.
    pub fn xi(&self) -> u32 {
        self.top() + 2
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={}, b={}", self.m, self.b)
    }
}

fn d(n: i64) -> Dyadic {
    Dyadic::from(n)
}

// n + num/2^exp
fn dq(n: i64, num: i64, exp: u32) -> Dyadic {
    &d(n) + &Dyadic::ratio(num, exp)
}

/// The standard generator `x_i`: identity up to `i`, slope 2 on `[i, i+1]`,
/// translation by 1 beyond.
pub fn std_x(i: u32) -> PLMap {
    let i = i64::from(i);
    let mut breaks = vec![(d(0), d(0))];
    if i > 0 {
        breaks.push((d(i), d(i)));
    }
    breaks.push((d(i + 1), d(i + 2)));
    PLMap::from_breaks(breaks, 1).expect("generator table is valid")
}

/// `y_i = x_i^2 x_{i+1}^{-1} x_i^{-1}`, supported in `(i, i+1)`.
pub fn std_y(i: u32) -> PLMap {
    std_x(i)
        .pow(2)
        .compose(&std_x(i + 1).invert())
        .compose(&std_x(i).invert())
}

/// `z_i = x_i^3 x_{i+1}^{-1} x_i^{-2}`, supported in `(i, i+1)`.
pub fn std_z(i: u32) -> PLMap {
    std_x(i)
        .pow(3)
        .compose(&std_x(i + 1).invert())
        .compose(&std_x(i).pow(-2))
}

/// `w_i = x_i x_{i+1}^{-1}`, supported in `(i, i+2)`.
pub fn std_w(i: u32) -> PLMap {
    std_x(i).compose(&std_x(i + 1).invert())
}

/// The period-4 block `w_o^{-2} w_{o+2}^2` at `o = offset`, supported on
/// `[offset, offset+4]` with an isolated repelling fixed point in the middle.
pub fn second_block(offset: u32) -> PLMap {
    std_w(offset).pow(-2).compose(&std_w(offset + 2).pow(2))
}

/// The block chain `(w_b^{-2} w_{b+2}^2)(w_{b+4}^{-2} w_{b+6}^2) ···` with
/// `m` blocks, supported on `[b, b+4m]`.
pub fn g0(p: &Params) -> PLMap {
    let mut out = PLMap::identity();
    for k in 0..p.m() {
        out = out.compose(&second_block(p.b() + 4 * k));
    }
    out
}

/// `g0` conjugated by translation by 1, supported on `[b+1, b+4m+1]`.
pub fn g1(p: &Params) -> PLMap {
    g0(p).conjugate_by_translation(1)
}

/// The modified generator `X0(m, b)`.
///
/// Breakpoint table: slope 2 on `[0, 1]`, translation by 1 up to `b − 3/2`,
/// an entry ramp (slopes 1/2 then 1/4) into the block chain at `b`, the `m`
/// blocks, a half block on `[u, xi]`, and an exit ramp (slopes 4 then 2)
/// rejoining `t ↦ t + 1` at `xi + 1/2`.
pub fn build_x0(p: &Params) -> PLMap {
    let b = i64::from(p.b());
    let u = i64::from(p.top());
    let xi = i64::from(p.xi());
    let mut pts: Vec<(Dyadic, Dyadic)> = vec![
        (d(0), d(0)),
        (d(1), d(2)),
        (dq(b, -3, 1), dq(b, -1, 1)),
        (dq(b, -1, 0), dq(b, -1, 2)),
        (d(b), d(b)),
    ];
    for k in 0..i64::from(p.m()) {
        let o = b + 4 * k;
        pts.extend([
            (dq(o, 1, 0), dq(o, 1, 2)),
            (dq(o, 3, 1), dq(o, 1, 1)),
            (dq(o, 7, 2), dq(o, 1, 0)),
            (dq(o, 2, 0), dq(o, 2, 0)),
            (dq(o, 9, 2), dq(o, 3, 0)),
            (dq(o, 5, 1), dq(o, 7, 1)),
            (dq(o, 3, 0), dq(o, 15, 2)),
            (dq(o, 4, 0), dq(o, 4, 0)),
        ]);
    }
    pts.extend([
        (dq(u, 1, 0), dq(u, 1, 2)),
        (dq(u, 3, 1), dq(u, 1, 1)),
        (dq(u, 7, 2), dq(u, 1, 0)),
        (d(xi), d(xi)),
        (dq(xi, 1, 2), dq(xi, 1, 0)),
        (dq(xi, 1, 1), dq(xi, 3, 1)),
    ]);
    let x0 = PLMap::from_breaks(pts, 1).expect("X0 table is a valid map");

    // the glueing constraints stated for the end modifications
    let agree = |f: &PLMap, g: &PLMap, lo: i64, hi: i64| {
        f.agree_on(g, &Interval::closed(d(lo), d(hi)).unwrap())
            .unwrap()
    };
    assert!(
        agree(&x0, &std_x(0), 0, b - 2),
        "X0 must agree with x0 on [0, b-2]"
    );
    assert!(
        agree(&x0, &g0(p), b, u),
        "X0 must agree with g0 on [b, b+4m]"
    );
    assert_eq!(
        x0.evaluate(&d(b - 2)).unwrap(),
        d(b - 1),
        "X0 translates by 1 at b-2"
    );
    assert_eq!(
        x0.evaluate(&d(u + 3)).unwrap(),
        d(u + 4),
        "X0 translates by 1 above u+3"
    );
    assert!(
        x0.breaks().last().unwrap().0 <= d(u + 3) && x0.tail_offset() == 1,
        "X0 must be t+1 on [b+4m+3, inf)"
    );
    assert_eq!(x0.evaluate(&d(xi)).unwrap(), d(xi), "xi is fixed");
    assert_eq!(
        x0.slope_at(&d(xi), Side::Right).unwrap(),
        d(4),
        "xi is repelling"
    );
    assert_eq!(
        x0.support().unwrap().last(),
        Some(&Interval::beyond(d(xi))),
        "xi is the rightmost fixed point"
    );
    x0
}

/// The marked generating pair `(X0, X1)` with `X1 = X0` conjugated by
/// translation by 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub params: Params,
    pub x0: PLMap,
    pub x1: PLMap,
}

pub fn build_generators(p: &Params) -> GeneratorSet {
    let x0 = build_x0(p);
    let x1 = x0.conjugate_by_translation(1);
    let b = i64::from(p.b());
    assert!(
        x1.agree_on(&std_x(1), &Interval::closed(d(0), d(b - 1)).unwrap())
            .unwrap(),
        "X1 must agree with x1 on [0, b-1]"
    );
    GeneratorSet { params: *p, x0, x1 }
}

impl GeneratorSet {
    /// The marking as an assignment for word evaluation: `a ↦ X0, b ↦ X1`.
    pub fn assign(&self, gen: u32) -> Option<PLMap> {
        match gen {
            0 => Some(self.x0.clone()),
            1 => Some(self.x1.clone()),
            _ => None,
        }
    }

    pub fn pair(&self) -> [PLMap; 2] {
        [self.x0.clone(), self.x1.clone()]
    }
}

/// The word `X_i = X_0^{1-i} X_1 X_0^{i-1}` over the marking alphabet,
/// mirroring the relation that holds for the standard generators.
pub fn big_x(i: u32) -> Result<Word, ConstructError> {
    if i < 2 {
        return Err(ConstructError::IndexTooSmall(i));
    }
    let a = Word::letter(0, false, Alphabet::Marking(2));
    let b = Word::letter(1, false, Alphabet::Marking(2));
    let k = (i - 1) as i32;
    Ok(a.pow(-k).concat(&b).concat(&a.pow(k)))
}

/// The eleven named words of the tower, freely reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordTable {
    pub c: Word,
    pub s: Word,
    pub t: Word,
    pub sigma: Word,
    pub theta: Word,
    pub z: Word,
    pub w: Word,
    pub p: Word,
    pub q: Word,
    pub h: Word,
    pub k: Word,
}

impl WordTable {
    /// Builds the tower over the marking alphabet for a raw conjugation
    /// depth `i ≥ 3`, independent of a parameter set.
    pub fn at_depth(i: u32) -> Result<Self, ConstructError> {
        if i < 3 {
            return Err(ConstructError::IndexTooSmall(i));
        }
        Ok(word_tower(i as i32))
    }

    pub fn named(&self) -> [(&'static str, &Word); 11] {
        [
            ("C", &self.c),
            ("S", &self.s),
            ("T", &self.t),
            ("Sigma", &self.sigma),
            ("Theta", &self.theta),
            ("Z", &self.z),
            ("W", &self.w),
            ("P", &self.p),
            ("Q", &self.q),
            ("H", &self.h),
            ("K", &self.k),
        ]
    }

    pub fn get(&self, name: &str) -> Option<&Word> {
        self.named()
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .map(|(_, w)| *w)
    }
}

fn cat(parts: &[&Word]) -> Word {
    let mut out = parts[0].clone();
    for p in &parts[1..] {
        out = out.concat(p);
    }
    out.reduce()
}

fn commutator(u: &Word, v: &Word) -> Word {
    cat(&[u, v, &u.inverse(), &v.inverse()])
}

/// The capital words over the marking alphabet `{a, b} = {X0, X1}`:
///
/// ```text
/// C = X0^2 X1^2 X0^-2 X1^-2      Z = [S, Sigma]
/// S = X0 X2 X1^-2                W = [T, Theta]
/// T = X0^2 X2 X4 X3^-2 X1^-1 X0^-1    P = Z^-1 W
/// Sigma = C^-i S C^i             Q = X1^-1 P X1 P^-1
/// Theta = C^-i T C^i             H = X1^-2 Q X1^2,  K = X1 H X1^-1
/// ```
///
/// with `X_i` expanded through `X_i = X_0^{1-i} X_1 X_0^{i-1}` and `i = m+2`.
pub fn capital_words(p: &Params) -> WordTable {
    word_tower(p.conj_depth() as i32)
}

fn word_tower(i: i32) -> WordTable {
    let a = Word::letter(0, false, Alphabet::Marking(2));
    let b = Word::letter(1, false, Alphabet::Marking(2));
    let x2 = big_x(2).unwrap();
    let x3 = big_x(3).unwrap();
    let x4 = big_x(4).unwrap();

    let c = cat(&[&a.pow(2), &b.pow(2), &a.pow(-2), &b.pow(-2)]);
    let s = cat(&[&a, &x2, &b.pow(-2)]);
    let t = cat(&[&a.pow(2), &x2, &x4, &x3.pow(-2), &b.inverse(), &a.inverse()]);
    let sigma = cat(&[&c.pow(-i), &s, &c.pow(i)]);
    let theta = cat(&[&c.pow(-i), &t, &c.pow(i)]);
    let z = commutator(&s, &sigma);
    let w = commutator(&t, &theta);
    let pw = cat(&[&z.inverse(), &w]);
    let q = cat(&[&b.inverse(), &pw, &b, &pw.inverse()]);
    let h = cat(&[&b.pow(-2), &q, &b.pow(2)]);
    let k = cat(&[&b, &h, &b.inverse()]);
    WordTable {
        c,
        s,
        t,
        sigma,
        theta,
        z,
        w,
        p: pw,
        q,
        h,
        k,
    }
}

/// The lower-case twins: the identically shaped words over `{x0, x1}`.
pub fn lower_words(p: &Params) -> WordTable {
    let cap = capital_words(p);
    let re = |w: &Word| w.retag(Alphabet::X);
    WordTable {
        c: re(&cap.c),
        s: re(&cap.s),
        t: re(&cap.t),
        sigma: re(&cap.sigma),
        theta: re(&cap.theta),
        z: re(&cap.z),
        w: re(&cap.w),
        p: re(&cap.p),
        q: re(&cap.q),
        h: re(&cap.h),
        k: re(&cap.k),
    }
}
