//! Presentations, letters, words, and canonical normal forms.
//!
//! Four presentation families share one letter type and one normalization
//! routine, differing only in their commutation predicate and in whether
//! inverse letters exist:
//!
//! * `free:k` is the free group on `z1..zk`, no two distinct letters commute;
//! * `abelian:k` is the free abelian group, all letters commute;
//! * `lfgroup:k` is the group where `zi` and `zj` commute exactly when
//!   `|i - j| >= 2` (neighbours in the chain interact, distant pairs slide);
//! * `lfsemigroup:k` is the monoid with the same commutation rule and no
//!   inverses, so lengths never shrink.
//!
//! The canonical representative of an element is the unique word that is
//! geodesic (no cancelling pair can be brought together by sliding commuting
//! letters) and descent-free (no adjacent commuting pair in decreasing letter
//! order). It is the lexicographically least geodesic under the letter order
//! `z1 < z1^-1 < z2 < z2^-1 < ...`. [`GroupPresentation::append`] maintains
//! this form in one right-to-left scan per letter, which is what keeps exact
//! convolutions and million-element ball enumerations affordable.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Errors from parsing, validation, and algebraic operations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    /// Rank outside `1..=cap`.
    #[error("rank {rank} outside the supported range 1..={cap}")]
    InvalidRank { rank: u32, cap: u32 },
    /// A letter whose index exceeds the presentation's rank.
    #[error("letter {letter} does not belong to a rank-{rank} presentation")]
    LetterOutOfRange { letter: String, rank: u32 },
    /// An inverse letter fed to a presentation without inverses.
    #[error("inverse letter {letter} is not valid in a semigroup presentation")]
    InverseLetterInSemigroup { letter: String },
    /// Two operands built over different presentations.
    #[error("operands come from different presentations ({left} vs {right})")]
    MixedPresentations { left: String, right: String },
    /// Inversion requested where no inverses exist.
    #[error("inversion is not defined in a semigroup presentation")]
    UnsupportedInversion,
    /// Unrecognized generator token.
    #[error("cannot parse generator token {token:?}")]
    BadToken { token: String },
    /// Unrecognized presentation spec string.
    #[error("cannot parse presentation spec {spec:?} (expected kind:rank, e.g. free:2)")]
    BadPresentationSpec { spec: String },
}

/// Orientation of a letter: a generator or its formal inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

/// A single letter `zi` or `zi^-1`, packed as `(index - 1) * 2 + sign`.
///
/// The packed code makes the derived `Ord` agree with the canonical letter
/// order `z1 < z1^-1 < z2 < z2^-1 < ...`, so comparisons in the hot
/// normalization loop are single integer compares.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(transparent)]
pub struct Generator(u16);

impl Generator {
    /// Largest index representable by the packed encoding.
    pub const MAX_INDEX: u32 = (u16::MAX as u32 + 1) / 2;

    /// Builds the letter with the given 1-based index and sign.
    pub fn new(index: u32, sign: Sign) -> Result<Self, GroupError> {
        if index == 0 || index > Self::MAX_INDEX {
            return Err(GroupError::BadToken {
                token: format!("z{index}"),
            });
        }
        let bit = match sign {
            Sign::Positive => 0,
            Sign::Negative => 1,
        };
        Ok(Generator(((index - 1) * 2 + bit) as u16))
    }

    /// `zi`. Panics on an index outside `1..=MAX_INDEX`; intended for
    /// literals in tests and examples.
    pub fn positive(index: u32) -> Self {
        Self::new(index, Sign::Positive).expect("generator index out of range")
    }

    /// `zi^-1`. Panics on an index outside `1..=MAX_INDEX`.
    pub fn negative(index: u32) -> Self {
        Self::new(index, Sign::Negative).expect("generator index out of range")
    }

    /// 1-based generator index.
    pub fn index(self) -> u32 {
        (self.0 >> 1) as u32 + 1
    }

    /// Whether this is a generator or an inverse letter.
    pub fn sign(self) -> Sign {
        if self.0 & 1 == 0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    /// The formally inverse letter (flips the sign bit).
    pub fn inverse(self) -> Self {
        Generator(self.0 ^ 1)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Sign::Positive => write!(f, "z{}", self.index()),
            Sign::Negative => write!(f, "z{}^-1", self.index()),
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Generator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Letter aliases `a..h` for `z1..z8`, accepted on input.
const ALIASES: [char; 8] = ['a', 'b', 'c', 'd', 'e', 'f', 'g', 'h'];

impl FromStr for Generator {
    type Err = GroupError;

    /// Parses `z3`, `z3^-1`, the prefix variant `x3`, or the single-letter
    /// aliases `a..h` (`a` is `z1`, `b^-1` is `z2^-1`, and so on).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::BadToken { token: s.into() };
        let (base, sign) = match s.strip_suffix("^-1") {
            Some(base) => (base, Sign::Negative),
            None => (s, Sign::Positive),
        };
        let mut chars = base.chars();
        let head = chars.next().ok_or_else(bad)?;
        let rest = chars.as_str();
        if rest.is_empty() {
            if let Some(i) = ALIASES.iter().position(|&c| c == head) {
                return Generator::new(i as u32 + 1, sign);
            }
        }
        if head != 'z' && head != 'x' {
            return Err(bad());
        }
        let index: u32 = rest.parse().map_err(|_| bad())?;
        Generator::new(index, sign).map_err(|_| bad())
    }
}

/// An arbitrary (not necessarily canonical) sequence of letters.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word(pub Vec<Generator>);

impl Word {
    /// Parses a whitespace-separated token sequence. The token `e` denotes
    /// the empty word and may only appear alone.
    pub fn parse(s: &str) -> Result<Self, GroupError> {
        let tokens: Vec<&str> = s.split_whitespace().collect();
        if tokens == ["e"] {
            return Ok(Word(Vec::new()));
        }
        let letters = tokens
            .iter()
            .map(|t| t.parse())
            .collect::<Result<Vec<Generator>, _>>()?;
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("e");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

/// The four supported presentation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PresentationKind {
    Free,
    FreeAbelian,
    LocallyFreeGroup,
    LocallyFreeSemigroup,
}

impl PresentationKind {
    /// The spec-string name used by `Display`/`FromStr`.
    pub fn tag(self) -> &'static str {
        match self {
            PresentationKind::Free => "free",
            PresentationKind::FreeAbelian => "abelian",
            PresentationKind::LocallyFreeGroup => "lfgroup",
            PresentationKind::LocallyFreeSemigroup => "lfsemigroup",
        }
    }
}

/// Default upper bound on the rank accepted by [`GroupPresentation::new`].
pub const DEFAULT_RANK_CAP: u32 = 64;

/// A presentation family together with its rank.
///
/// This is the central handle of the crate: all algebraic operations are
/// methods on it, and every [`NormalForm`] remembers which presentation it
/// belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupPresentation {
    kind: PresentationKind,
    rank: u32,
}

impl GroupPresentation {
    /// Builds a presentation, enforcing `1 <= rank <= DEFAULT_RANK_CAP`.
    pub fn new(kind: PresentationKind, rank: u32) -> Result<Self, GroupError> {
        Self::with_rank_cap(kind, rank, DEFAULT_RANK_CAP)
    }

    /// Like [`new`](Self::new) with an explicit rank cap, for callers that
    /// genuinely need wider alphabets (memory grows linearly with rank in
    /// samplers and quadratically in ball enumeration budgets).
    pub fn with_rank_cap(
        kind: PresentationKind,
        rank: u32,
        cap: u32,
    ) -> Result<Self, GroupError> {
        let cap = cap.min(Generator::MAX_INDEX);
        if rank == 0 || rank > cap {
            return Err(GroupError::InvalidRank { rank, cap });
        }
        Ok(GroupPresentation { kind, rank })
    }

    pub fn kind(&self) -> PresentationKind {
        self.kind
    }

    /// Number of generators.
    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Whether inverse letters exist (false only for `lfsemigroup`).
    pub fn is_group(&self) -> bool {
        self.kind != PresentationKind::LocallyFreeSemigroup
    }

    /// Whether symmetric random walks escape at a positive linear rate.
    /// True for the semigroup (no cancellation, one letter per step) and
    /// for every group of exponential growth. False exactly for the
    /// diffusive cases: the free abelian family and the rank-1 groups,
    /// all isomorphic to powers of the integers, where word length grows
    /// like the square root of the step count and the escape rate is 0.
    pub fn has_linear_escape(&self) -> bool {
        match self.kind {
            PresentationKind::LocallyFreeSemigroup => true,
            PresentationKind::FreeAbelian => false,
            PresentationKind::Free | PresentationKind::LocallyFreeGroup => self.rank >= 2,
        }
    }

    /// All letters in canonical order: `2 * rank` for groups (each generator
    /// followed by its inverse), `rank` for the semigroup.
    pub fn alphabet(&self) -> Vec<Generator> {
        let mut letters = Vec::with_capacity(2 * self.rank as usize);
        for i in 1..=self.rank {
            letters.push(Generator::positive(i));
            if self.is_group() {
                letters.push(Generator::negative(i));
            }
        }
        letters
    }

    /// The standard generating system (the alphabet viewed as a symmetric
    /// set of group elements).
    pub fn generator_system(&self) -> GeneratorSystem {
        GeneratorSystem {
            presentation: *self,
            letters: self.alphabet(),
        }
    }

    /// Whether two letters commute in this presentation.
    ///
    /// Free: never. Abelian: always. Locally free (both variants): exactly
    /// when the generator indices differ by at least 2. A letter never
    /// "commutes" with its own inverse here; that pair cancels instead.
    pub fn commutes(&self, a: Generator, b: Generator) -> bool {
        match self.kind {
            PresentationKind::Free => false,
            PresentationKind::FreeAbelian => true,
            PresentationKind::LocallyFreeGroup | PresentationKind::LocallyFreeSemigroup => {
                a.index().abs_diff(b.index()) >= 2
            }
        }
    }

    /// Checks that a letter belongs to this presentation's alphabet.
    pub fn validate_letter(&self, g: Generator) -> Result<(), GroupError> {
        if g.index() > self.rank {
            return Err(GroupError::LetterOutOfRange {
                letter: g.to_string(),
                rank: self.rank,
            });
        }
        if !self.is_group() && g.sign() == Sign::Negative {
            return Err(GroupError::InverseLetterInSemigroup {
                letter: g.to_string(),
            });
        }
        Ok(())
    }

    /// The identity element.
    pub fn identity(&self) -> NormalForm {
        NormalForm {
            presentation: *self,
            letters: Vec::new(),
        }
    }

    /// Right-multiplies a canonical word by one letter, in place.
    ///
    /// Two scans from the right end: first look for a cancelling inverse
    /// that can slide adjacent to `g` (every letter passed over must commute
    /// with `g`); failing that, insert `g` at the left edge of its commuting
    /// suffix window, just before the first larger letter, keeping the word
    /// descent-free. Both scans are short in practice (the window size is
    /// bounded by the alphabet for the locally free kinds).
    fn push_letter(&self, w: &mut Vec<Generator>, g: Generator) {
        if self.is_group() {
            let gi = g.inverse();
            let mut j = w.len();
            while j > 0 {
                let c = w[j - 1];
                if c == gi {
                    w.remove(j - 1);
                    return;
                }
                if !self.commutes(c, g) {
                    break;
                }
                j -= 1;
            }
        }
        let mut lo = w.len();
        while lo > 0 && self.commutes(w[lo - 1], g) {
            lo -= 1;
        }
        let mut pos = w.len();
        for q in lo..w.len() {
            if w[q] > g {
                pos = q;
                break;
            }
        }
        w.insert(pos, g);
    }

    /// Canonicalizes an arbitrary word by folding its letters through
    /// [`append`](Self::append).
    pub fn normalize(&self, word: &Word) -> Result<NormalForm, GroupError> {
        let mut letters = Vec::with_capacity(word.len());
        for &g in &word.0 {
            self.validate_letter(g)?;
            self.push_letter(&mut letters, g);
        }
        Ok(NormalForm {
            presentation: *self,
            letters,
        })
    }

    /// Right-multiplies by a single letter, returning the canonical product.
    pub fn append(&self, nf: &NormalForm, g: Generator) -> Result<NormalForm, GroupError> {
        self.check_same(nf)?;
        self.validate_letter(g)?;
        let mut letters = nf.letters.clone();
        self.push_letter(&mut letters, g);
        Ok(NormalForm {
            presentation: *self,
            letters,
        })
    }

    /// Canonical product of two canonical words.
    pub fn multiply(&self, a: &NormalForm, b: &NormalForm) -> Result<NormalForm, GroupError> {
        self.check_same(a)?;
        self.check_same(b)?;
        let mut letters = a.letters.clone();
        letters.reserve(b.letters.len());
        for &g in &b.letters {
            self.push_letter(&mut letters, g);
        }
        Ok(NormalForm {
            presentation: *self,
            letters,
        })
    }

    /// Canonical inverse. Fails for the semigroup presentation.
    pub fn invert(&self, a: &NormalForm) -> Result<NormalForm, GroupError> {
        self.check_same(a)?;
        if !self.is_group() {
            return Err(GroupError::UnsupportedInversion);
        }
        let mut letters = Vec::with_capacity(a.letters.len());
        for &g in a.letters.iter().rev() {
            self.push_letter(&mut letters, g.inverse());
        }
        Ok(NormalForm {
            presentation: *self,
            letters,
        })
    }

    /// Parses and validates a whitespace-separated word over this alphabet.
    pub fn parse_word(&self, s: &str) -> Result<Word, GroupError> {
        let word = Word::parse(s)?;
        for &g in &word.0 {
            self.validate_letter(g)?;
        }
        Ok(word)
    }

    /// In-place letter append for crate-internal hot loops; the caller must
    /// have validated the letter.
    pub(crate) fn push_letter_unchecked(&self, letters: &mut Vec<Generator>, g: Generator) {
        self.push_letter(letters, g);
    }

    fn check_same(&self, nf: &NormalForm) -> Result<(), GroupError> {
        if nf.presentation != *self {
            return Err(GroupError::MixedPresentations {
                left: self.to_string(),
                right: nf.presentation.to_string(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.tag(), self.rank)
    }
}

impl FromStr for GroupPresentation {
    type Err = GroupError;

    /// Parses `kind:rank` specs such as `free:2` or `lfsemigroup:10`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GroupError::BadPresentationSpec { spec: s.into() };
        let (kind_str, rank_str) = s.split_once(':').ok_or_else(bad)?;
        let kind = match kind_str {
            "free" => PresentationKind::Free,
            "abelian" => PresentationKind::FreeAbelian,
            "lfgroup" => PresentationKind::LocallyFreeGroup,
            "lfsemigroup" => PresentationKind::LocallyFreeSemigroup,
            _ => return Err(bad()),
        };
        let rank: u32 = rank_str.parse().map_err(|_| bad())?;
        GroupPresentation::new(kind, rank)
    }
}

impl Serialize for GroupPresentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A symmetric generating set: the presentation's own alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSystem {
    presentation: GroupPresentation,
    letters: Vec<Generator>,
}

impl GeneratorSystem {
    pub fn presentation(&self) -> GroupPresentation {
        self.presentation
    }

    /// Letters in canonical order.
    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    /// Whether the set is closed under inversion (true for all group kinds).
    pub fn symmetric(&self) -> bool {
        self.presentation.is_group()
    }
}

/// The canonical word representing one element.
///
/// Values can only be produced by the methods on [`GroupPresentation`], so
/// the canonical-form invariant holds by construction. Equality, hashing,
/// and ordering are plain structural operations on the letter sequence,
/// which is what makes exact distribution tables possible.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NormalForm {
    presentation: GroupPresentation,
    letters: Vec<Generator>,
}

impl NormalForm {
    pub fn presentation(&self) -> GroupPresentation {
        self.presentation
    }

    /// The canonical letter sequence.
    pub fn letters(&self) -> &[Generator] {
        &self.letters
    }

    /// Word length of the canonical representative. For groups this is the
    /// metric distance to the identity; for the semigroup it also equals
    /// the number of letters multiplied so far, since nothing cancels.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// The underlying word, for re-parsing or display.
    pub fn to_word(&self) -> Word {
        Word(self.letters.clone())
    }

    pub(crate) fn from_parts(presentation: GroupPresentation, letters: Vec<Generator>) -> Self {
        NormalForm {
            presentation,
            letters,
        }
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("e");
        }
        for (i, g) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.presentation, self)
    }
}

impl Serialize for NormalForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
