//! Free words over signed alphabets: reduction, enumeration, parsing and
//! evaluation into piecewise-linear maps.
//!
//! Two alphabets are used. The infinite alphabet `x0, x1, x2, ...` names the
//! standard generators; the 2-letter marking alphabet `a, b` names an
//! arbitrary generating pair.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::plmap::PLMap;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("syntax error at byte {0}")]
    Syntax(usize),
    #[error("exponent out of range at byte {0}")]
    ExponentOverflow(usize),
    #[error("word mixes the x-alphabet with the marking alphabet (byte {0})")]
    MixedAlphabets(usize),
    #[error("generator {0} outside the marking alphabet")]
    OutsideMarking(u32),
    #[error("no map assigned to generator {0}")]
    Unassigned(u32),
}

/// Which generator family a word is written over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alphabet {
    /// The infinite family `x0, x1, x2, ...`.
    X,
    /// An abstract marking alphabet of the given rank; generators `a`, `b`
    /// are indices 0 and 1.
    Marking(u32),
}

/// One signed letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: u32,
    pub inverse: bool,
}

impl Letter {
    pub fn new(gen: u32, inverse: bool) -> Self {
        Letter { gen, inverse }
    }

    pub fn inverted(self) -> Self {
        Letter {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    fn cancels(self, other: Letter) -> bool {
        self.gen == other.gen && self.inverse != other.inverse
    }
}

/// A word over a signed alphabet; not necessarily reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    alphabet: Alphabet,
}

impl Word {
    pub fn empty(alphabet: Alphabet) -> Self {
        Word {
            letters: Vec::new(),
            alphabet,
        }
    }

    pub fn from_letters(letters: Vec<Letter>, alphabet: Alphabet) -> Self {
        if let Alphabet::Marking(k) = alphabet {
            debug_assert!(letters.iter().all(|l| l.gen < k));
        }
        Word { letters, alphabet }
    }

    /// Single-letter word.
    pub fn letter(gen: u32, inverse: bool, alphabet: Alphabet) -> Self {
        Word::from_letters(vec![Letter::new(gen, inverse)], alphabet)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Length in letters (exponents expanded).
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|w| !w[0].cancels(w[1]))
    }

    /// Free reduction: repeatedly delete adjacent inverse pairs.
    pub fn reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.letters.len());
        for &l in &self.letters {
            if out.last().is_some_and(|&top| top.cancels(l)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word {
            letters: out,
            alphabet: self.alphabet,
        }
    }

    /// Concatenation; both words must be over the same alphabet.
    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.alphabet, other.alphabet, "concat across alphabets");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word {
            letters,
            alphabet: self.alphabet,
        }
    }

    /// The formal inverse: reversed letters with flipped signs.
    pub fn inverse(&self) -> Word {
        let letters = self.letters.iter().rev().map(|l| l.inverted()).collect();
        Word {
            letters,
            alphabet: self.alphabet,
        }
    }

    /// `self` repeated `k` times; negative `k` repeats the inverse.
    pub fn pow(&self, k: i32) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut letters = Vec::with_capacity(base.letters.len() * k.unsigned_abs() as usize);
        for _ in 0..k.unsigned_abs() {
            letters.extend_from_slice(&base.letters);
        }
        Word {
            letters,
            alphabet: self.alphabet,
        }
    }

    /// Re-tags the word over a different alphabet, keeping the letters.
    pub fn retag(&self, alphabet: Alphabet) -> Word {
        Word::from_letters(self.letters.clone(), alphabet)
    }

    /// Left-to-right evaluation under the right-action convention: the first
    /// letter is applied first.
    pub fn to_map<F>(&self, assign: F) -> Result<PLMap, WordError>
    where
        F: Fn(u32) -> Option<PLMap>,
    {
        let mut cache: HashMap<(u32, bool), PLMap> = HashMap::new();
        let mut out = PLMap::identity();
        for l in &self.letters {
            if let std::collections::hash_map::Entry::Vacant(e) = cache.entry((l.gen, l.inverse)) {
                let base = assign(l.gen).ok_or(WordError::Unassigned(l.gen))?;
                let m = if l.inverse { base.invert() } else { base };
                e.insert(m);
            }
            out = out.compose(&cache[&(l.gen, l.inverse)]);
        }
        Ok(out)
    }

    /// Parses the grammar `word := term*; term := NAME ("^" SIGNED_INT)?`
    /// with `NAME := "x" UINT | "a" | "b"`. Terms are whitespace separated;
    /// exponents expand eagerly into letters.
    pub fn parse(text: &str) -> Result<Word, WordError> {
        let mut letters = Vec::new();
        let mut alphabet: Option<Alphabet> = None;
        let bytes = text.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            if bytes[i].is_ascii_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            let gen: u32;
            match bytes[i] {
                b'x' => {
                    i += 1;
                    let ds = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if ds == i {
                        return Err(WordError::Syntax(start));
                    }
                    gen = text[ds..i]
                        .parse()
                        .map_err(|_| WordError::ExponentOverflow(ds))?;
                    match alphabet {
                        None => alphabet = Some(Alphabet::X),
                        Some(Alphabet::X) => {}
                        Some(_) => return Err(WordError::MixedAlphabets(start)),
                    }
                }
                b'a' | b'b' => {
                    gen = u32::from(bytes[i] - b'a');
                    i += 1;
                    match alphabet {
                        None => alphabet = Some(Alphabet::Marking(2)),
                        Some(Alphabet::Marking(_)) => {}
                        Some(_) => return Err(WordError::MixedAlphabets(start)),
                    }
                }
                _ => return Err(WordError::Syntax(start)),
            }
            let mut exp: i64 = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let es = i;
                if i < bytes.len() && (bytes[i] == b'-' || bytes[i] == b'+') {
                    i += 1;
                }
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == es || (i == es + 1 && !bytes[es].is_ascii_digit()) {
                    return Err(WordError::Syntax(es));
                }
                exp = text[es..i]
                    .parse()
                    .map_err(|_| WordError::ExponentOverflow(es))?;
                if exp.unsigned_abs() > 1 << 20 {
                    return Err(WordError::ExponentOverflow(es));
                }
            }
            if i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                return Err(WordError::Syntax(i));
            }
            let inverse = exp < 0;
            for _ in 0..exp.unsigned_abs() {
                letters.push(Letter::new(gen, inverse));
            }
        }
        Ok(Word {
            letters,
            alphabet: alphabet.unwrap_or(Alphabet::X),
        })
    }
}

impl fmt::Display for Word {
    /// Run-grouped form, e.g. `x0^2 x1^-1` or `a b^-2`. The empty word
    /// prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        let name = |g: u32| match self.alphabet {
            Alphabet::X => format!("x{g}"),
            Alphabet::Marking(_) => char::from_u32(u32::from(b'a') + g)
                .map(String::from)
                .unwrap_or_else(|| format!("g{g}")),
        };
        let mut first = true;
        let mut i = 0;
        while i < self.letters.len() {
            let l = self.letters[i];
            let mut run = 1;
            while i + run < self.letters.len() && self.letters[i + run] == l {
                run += 1;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let e = if l.inverse { -(run as i64) } else { run as i64 };
            if e == 1 {
                write!(f, "{}", name(l.gen))?;
            } else {
                write!(f, "{}^{}", name(l.gen), e)?;
            }
            i += run;
        }
        Ok(())
    }
}

/// Streams every freely reduced word of length at most `max_len` over
/// `rank` generators, each exactly once, in length-lexicographic order.
///
/// Letters are ordered `g0, g0^-1, g1, g1^-1, ...`. The stream starts with
/// the empty word and is deterministic, so failed searches are reproducible.
pub fn enumerate_reduced(rank: u32, max_len: u32) -> ReducedWords {
    assert!(rank >= 1);
    ReducedWords {
        rank,
        max_len,
        cur_len: 0,
        state: None,
        done: false,
    }
}

pub struct ReducedWords {
    rank: u32,
    max_len: u32,
    cur_len: usize,
    // letter ids: 2*gen + (1 if inverse); None before the empty word is out
    state: Option<Vec<u8>>,
    done: bool,
}

// smallest id allowed after `prev`; the forbidden successor of p is p^1
fn first_after(prev: Option<u8>) -> u8 {
    match prev {
        Some(p) if p ^ 1 == 0 => 1,
        _ => 0,
    }
}

// next reduced word of the same length in lex order; false when exhausted
fn advance_same_length(ids: &mut Vec<u8>, id_count: u8) -> bool {
    let len = ids.len();
    while let Some(cur) = ids.pop() {
        let prev = ids.last().copied();
        let mut cand = cur + 1;
        if prev.is_some_and(|p| p ^ 1 == cand) {
            cand += 1;
        }
        if cand < id_count {
            ids.push(cand);
            while ids.len() < len {
                ids.push(first_after(ids.last().copied()));
            }
            return true;
        }
    }
    false
}

impl ReducedWords {
    fn word_from_ids(&self, ids: &[u8]) -> Word {
        let letters = ids
            .iter()
            .map(|&id| Letter::new(u32::from(id >> 1), id & 1 == 1))
            .collect();
        Word::from_letters(letters, Alphabet::Marking(self.rank))
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let id_count = (2 * self.rank) as u8;
        match &mut self.state {
            None => {
                self.state = Some(Vec::new());
                self.cur_len = 0;
                Some(Word::empty(Alphabet::Marking(self.rank)))
            }
            Some(ids) => {
                if !advance_same_length(ids, id_count) {
                    self.cur_len += 1;
                    if self.cur_len > self.max_len as usize {
                        self.done = true;
                        return None;
                    }
                    while ids.len() < self.cur_len {
                        ids.push(first_after(ids.last().copied()));
                    }
                }
                let ids = self.state.as_ref().unwrap();
                Some(self.word_from_ids(ids))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn x(i: u32) -> PLMap {
        crate::construct::std_x(i)
    }

    fn std_assign(g: u32) -> Option<PLMap> {
        Some(x(g))
    }

    #[test]
    fn reduction() {
        let w = Word::parse("x0 x0^-1").unwrap();
        assert!(w.reduce().is_empty());
        let w = Word::parse("x0 x1 x1^-1 x0").unwrap();
        assert_eq!(w.reduce(), Word::parse("x0 x0").unwrap().reduce());
        assert_eq!(w.reduce().to_string(), "x0^2");
        // idempotent and length non-increasing
        let v = Word::parse("x1 x2^-1 x2 x2 x0^-1 x0").unwrap();
        let r = v.reduce();
        assert!(r.is_reduced());
        assert_eq!(r.reduce(), r);
        assert!(r.len() <= v.len());
    }

    #[test]
    fn parsing() {
        let w = Word::parse("x0 x1^-1").unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w.alphabet(), Alphabet::X);
        let w = Word::parse("x2^3").unwrap();
        assert_eq!(w.len(), 3);
        assert!(w.letters().iter().all(|l| l.gen == 2 && !l.inverse));
        let w = Word::parse("a b^-2").unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.alphabet(), Alphabet::Marking(2));
        assert_eq!(w.to_string(), "a b^-2");
        assert!(Word::parse("x0 a").is_err());
        assert!(Word::parse("y3").is_err());
        assert!(Word::parse("x").is_err());
        assert!(Word::parse("x1^").is_err());
        assert!(Word::parse("x1^99999999999999999999").is_err());
        assert!(Word::parse("x1^4000000").is_err());
        assert_eq!(Word::parse("").unwrap().len(), 0);
        assert_eq!(Word::parse("x3^0").unwrap().len(), 0);
    }

    #[test]
    fn display_round_trip() {
        for s in ["x0^2 x1^-1 x0", "a^3 b^-2 a", "x12 x3^-4"] {
            let w = Word::parse(s).unwrap();
            assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
        }
    }

    #[test]
    fn enumeration_counts_and_shape() {
        // k = 2: 2*3^L - 1 reduced words of length <= L, empty included
        for max_len in 0..=10u32 {
            let expect = 2 * 3u64.pow(max_len) - 1;
            assert_eq!(enumerate_reduced(2, max_len).count() as u64, expect);
        }
        // no adjacent inverse pair, and words arrive in length order
        let mut last_len = 0;
        for w in enumerate_reduced(2, 7) {
            assert!(w.is_reduced());
            assert!(w.len() >= last_len);
            last_len = w.len();
        }
        let five: Vec<String> = enumerate_reduced(2, 1).map(|w| w.to_string()).collect();
        assert_eq!(five, vec!["1", "a", "a^-1", "b", "b^-1"]);
        assert_eq!(enumerate_reduced(2, 3).count(), 53);
    }

    #[test]
    fn enumeration_other_ranks() {
        // rank 1: only powers of the single generator, 2L+1 words
        for l in 0..=6u32 {
            assert_eq!(enumerate_reduced(1, l).count() as u32, 2 * l + 1);
        }
        // rank 3: 1 + 6 + 6*5 + 6*25 = 187 through length 3
        assert_eq!(enumerate_reduced(3, 3).count(), 187);
        for w in enumerate_reduced(3, 4) {
            assert!(w.is_reduced());
        }
    }

    #[test]
    fn evaluation() {
        let e = Word::empty(Alphabet::X);
        assert!(e.to_map(std_assign).unwrap().is_identity());
        // y_0 = x_0^2 x_1^-1 x_0^-1
        let y0 = Word::parse("x0^2 x1^-1 x0^-1")
            .unwrap()
            .to_map(std_assign)
            .unwrap();
        let expect_y0 = PLMap::from_breaks(
            vec![
                (Dyadic::from(0i64), Dyadic::from(0i64)),
                (Dyadic::ratio(1, 2), Dyadic::ratio(1, 1)),
                (Dyadic::ratio(1, 1), Dyadic::ratio(3, 2)),
                (Dyadic::from(1i64), Dyadic::from(1i64)),
            ],
            0,
        )
        .unwrap();
        assert_eq!(y0, expect_y0);
        // z_0 = x_0^3 x_1^-1 x_0^-2
        let z0 = Word::parse("x0^3 x1^-1 x0^-2")
            .unwrap()
            .to_map(std_assign)
            .unwrap();
        assert_eq!(
            z0.evaluate(&Dyadic::ratio(3, 2)).unwrap(),
            Dyadic::ratio(3, 2)
        );
        assert_eq!(
            z0.evaluate(&Dyadic::ratio(1, 3)).unwrap(),
            Dyadic::ratio(1, 2)
        );
        // unassigned generator index is an error
        let w = Word::parse("x5").unwrap();
        assert_eq!(
            w.to_map(|g| if g < 2 { Some(x(g)) } else { None }),
            Err(WordError::Unassigned(5))
        );
    }

    #[test]
    fn evaluation_respects_reduction_and_concat() {
        let u = Word::parse("x0 x2 x1^-1").unwrap();
        let v = Word::parse("x1 x1 x0^-1").unwrap();
        let uv = u.concat(&v);
        assert_eq!(
            uv.to_map(std_assign).unwrap(),
            u.to_map(std_assign)
                .unwrap()
                .compose(&v.to_map(std_assign).unwrap())
        );
        assert_eq!(
            uv.reduce().to_map(std_assign).unwrap(),
            uv.to_map(std_assign).unwrap()
        );
        let winv = uv.inverse();
        assert!(uv
            .to_map(std_assign)
            .unwrap()
            .compose(&winv.to_map(std_assign).unwrap())
            .is_identity());
    }
}
