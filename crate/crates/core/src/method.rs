//! Shuffling methods as size-indexed families of non-identity permutations.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// The built-in methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    /// Rotations `k(k+1)…n12…(k-1)` for `k ∈ [2, n]`.
    Cuts,
    /// The single reversal `n(n-1)…1`.
    Rev,
    /// Swap of the first and last card: `n23…(n-1)1`.
    TopBottom,
    /// Perfect riffle leaving the top card second from top.
    InShuffle,
    /// Alternate over/under dealing: evens descending, then odds ascending.
    Monge,
}

impl Builtin {
    pub const ALL: [Builtin; 5] = [
        Builtin::Cuts,
        Builtin::Rev,
        Builtin::TopBottom,
        Builtin::InShuffle,
        Builtin::Monge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Cuts => "cuts",
            Builtin::Rev => "rev",
            Builtin::TopBottom => "top-bottom",
            Builtin::InShuffle => "in-shuffle",
            Builtin::Monge => "monge",
        }
    }

    pub fn from_name(name: &str) -> Result<Builtin> {
        let b = match name.to_ascii_lowercase().as_str() {
            "cuts" | "cut" => Builtin::Cuts,
            "rev" | "reverse" => Builtin::Rev,
            "top-bottom" | "topbottom" | "top_bottom" => Builtin::TopBottom,
            "in-shuffle" | "inshuffle" | "in-sh" | "insh" | "in_shuffle" => Builtin::InShuffle,
            "monge" => Builtin::Monge,
            _ => return Err(Error::UnknownMethod(name.to_string())),
        };
        Ok(b)
    }

    fn generate(self, n: usize) -> Vec<Permutation> {
        if n < 2 {
            return Vec::new();
        }
        let n8 = n as u8;
        let words: Vec<Vec<u8>> = match self {
            Builtin::Cuts => (2..=n8)
                .map(|k| (k..=n8).chain(1..k).collect())
                .collect(),
            Builtin::Rev => vec![(1..=n8).rev().collect()],
            Builtin::TopBottom => {
                let mut w: Vec<u8> = (1..=n8).collect();
                w.swap(0, n - 1);
                vec![w]
            }
            Builtin::InShuffle => {
                let k = n8 / 2;
                let mut w = Vec::with_capacity(n);
                for i in 1..=k {
                    w.push(k + i);
                    w.push(i);
                }
                if n % 2 == 1 {
                    w.push(n8);
                }
                vec![w]
            }
            Builtin::Monge => {
                let top_even = if n.is_multiple_of(2) { n8 } else { n8 - 1 };
                let mut w: Vec<u8> = (1..=top_even / 2).rev().map(|i| 2 * i).collect();
                w.extend((0..).map(|i| 2 * i + 1).take_while(|&v| v <= n8));
                vec![w]
            }
        };
        words.into_iter().map(Permutation::from_vec_unchecked).collect()
    }
}

#[derive(Debug)]
enum Source {
    Builtin(Builtin),
    /// Finite support: sizes absent from the map have empty families.
    Custom(BTreeMap<usize, Vec<Permutation>>),
}

#[derive(Debug)]
struct Inner {
    name: String,
    source: Source,
    cache: RwLock<HashMap<usize, Arc<[Permutation]>>>,
}

/// A shuffling method: for each size `n ≥ 2`, a finite set of non-identity
/// permutations of size `n` that a shuffle operation may apply.
///
/// Cheap to clone; the per-size family cache is shared and safe to read from
/// many threads.
#[derive(Debug, Clone)]
pub struct ShufflingMethod {
    inner: Arc<Inner>,
}

impl PartialEq for ShufflingMethod {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.name == other.inner.name
    }
}

impl fmt::Display for ShufflingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.inner.name)
    }
}

impl ShufflingMethod {
    pub fn builtin(kind: Builtin) -> Self {
        Self::from_source(kind.name().to_string(), Source::Builtin(kind))
    }

    /// Looks a built-in method up by name (`cuts`, `rev`, `top-bottom`,
    /// `in-shuffle`, `monge`, plus a few aliases).
    pub fn by_name(name: &str) -> Result<Self> {
        Builtin::from_name(name).map(Self::builtin)
    }

    pub fn cuts() -> Self {
        Self::builtin(Builtin::Cuts)
    }

    pub fn rev() -> Self {
        Self::builtin(Builtin::Rev)
    }

    pub fn top_bottom() -> Self {
        Self::builtin(Builtin::TopBottom)
    }

    pub fn in_shuffle() -> Self {
        Self::builtin(Builtin::InShuffle)
    }

    pub fn monge() -> Self {
        Self::builtin(Builtin::Monge)
    }

    /// A method with explicitly listed families. Sizes missing from
    /// `families` get the empty family, so the device cannot shuffle at
    /// those sizes.
    pub fn custom(
        name: impl Into<String>,
        families: BTreeMap<usize, Vec<Permutation>>,
    ) -> Result<Self> {
        for (&size, members) in &families {
            if size < 2 {
                return Err(Error::InvalidMethod(format!(
                    "family sizes start at 2, got {size}"
                )));
            }
            for (i, sigma) in members.iter().enumerate() {
                if sigma.len() != size {
                    return Err(Error::InvalidMethod(format!(
                        "member {sigma} has size {} in the family of size {size}",
                        sigma.len()
                    )));
                }
                if sigma.is_identity() {
                    return Err(Error::InvalidMethod(format!(
                        "identity {sigma} is not allowed in a family"
                    )));
                }
                if members[..i].contains(sigma) {
                    return Err(Error::InvalidMethod(format!(
                        "duplicate member {sigma} in the family of size {size}"
                    )));
                }
            }
        }
        Ok(Self::from_source(name.into(), Source::Custom(families)))
    }

    /// Parses the custom method text format: one line per size,
    /// `n: perm ; perm ; …`, with `#` starting a comment. `n:` with nothing
    /// after it declares an empty family.
    pub fn parse_custom(name: impl Into<String>, text: &str) -> Result<Self> {
        let mut families: BTreeMap<usize, Vec<Permutation>> = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| {
                Error::InvalidMethod(format!("line {}: {reason}", lineno + 1))
            };
            let (size, rest) = line
                .split_once(':')
                .ok_or_else(|| bad("expected `n: perm ; perm`".into()))?;
            let size: usize = size
                .trim()
                .parse()
                .map_err(|e| bad(format!("bad size {size:?}: {e}")))?;
            if families.contains_key(&size) {
                return Err(bad(format!("size {size} declared twice")));
            }
            let members = rest
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<Permutation>().map_err(|e| bad(e.to_string())))
                .collect::<Result<Vec<_>>>()?;
            families.insert(size, members);
        }
        Self::custom(name, families)
    }

    pub fn load_custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::InvalidMethod(format!("cannot read {}: {e}", path.display()))
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "custom".to_string());
        Self::parse_custom(name, &text)
    }

    fn from_source(name: String, source: Source) -> Self {
        ShufflingMethod {
            inner: Arc::new(Inner {
                name,
                source,
                cache: RwLock::new(HashMap::new()),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn builtin_kind(&self) -> Option<Builtin> {
        match self.inner.source {
            Source::Builtin(b) => Some(b),
            Source::Custom(_) => None,
        }
    }

    /// The family of size `n` (empty for `n < 2`).
    pub fn family(&self, n: usize) -> Arc<[Permutation]> {
        if let Some(f) = self.inner.cache.read().expect("family cache").get(&n) {
            return Arc::clone(f);
        }
        let generated: Arc<[Permutation]> = match &self.inner.source {
            Source::Builtin(b) => b.generate(n).into(),
            Source::Custom(map) => map.get(&n).cloned().unwrap_or_default().into(),
        };
        let mut cache = self.inner.cache.write().expect("family cache");
        Arc::clone(cache.entry(n).or_insert(generated))
    }

    /// `{σ⁻¹ : σ ∈ family(n)}`, in family order.
    pub fn inverse_family(&self, n: usize) -> Vec<Permutation> {
        self.family(n).iter().map(Permutation::inverse).collect()
    }

    pub fn contains(&self, sigma: &Permutation) -> bool {
        self.family(sigma.len()).contains(sigma)
    }

    /// The single member of `family(n)`, when the family has exactly one.
    pub fn single(&self, n: usize) -> Option<Permutation> {
        let f = self.family(n);
        (f.len() == 1).then(|| f[0].clone())
    }

    /// Every family up to `n_max` has one member and it starts with `n`.
    pub fn is_back_front(&self, n_max: usize) -> bool {
        (2..=n_max).all(|n| {
            let f = self.family(n);
            f.len() == 1 && f[0].at(1) as usize == n
        })
    }

    /// Every member of every family up to `n_max` is irreducible.
    pub fn is_irreducible_family(&self, n_max: usize) -> bool {
        (2..=n_max).all(|n| self.family(n).iter().all(Permutation::is_irreducible))
    }

    /// For every `2 ≤ k ≤ n_max` and `j ∈ [k-1]`, some inverse family member
    /// of size `k` ends in `j`.
    pub fn satisfies_ending_condition(&self, n_max: usize) -> bool {
        (2..=n_max).all(|k| {
            let ends: Vec<u8> = self.inverse_family(k).iter().map(|s| s.at(k)).collect();
            (1..k as u8).all(|j| ends.contains(&j))
        })
    }

    /// `star` maps each family up to `n_max` onto itself.
    pub fn is_closed_under_star(&self, n_max: usize) -> bool {
        (2..=n_max).all(|n| {
            let f = self.family(n);
            f.iter().all(|s| f.contains(&s.star()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn fam(m: &ShufflingMethod, n: usize) -> Vec<Permutation> {
        m.family(n).to_vec()
    }

    #[test]
    fn builtin_families() {
        assert_eq!(fam(&ShufflingMethod::cuts(), 3), vec![p("231"), p("312")]);
        assert_eq!(fam(&ShufflingMethod::in_shuffle(), 8), vec![p("51627384")]);
        assert_eq!(fam(&ShufflingMethod::monge(), 8), vec![p("86421357")]);
        assert_eq!(fam(&ShufflingMethod::monge(), 7), vec![p("6421357")]);
        assert_eq!(fam(&ShufflingMethod::monge(), 2), vec![p("21")]);
        assert_eq!(fam(&ShufflingMethod::in_shuffle(), 5), vec![p("31425")]);
        assert_eq!(fam(&ShufflingMethod::top_bottom(), 5), vec![p("52341")]);
        assert_eq!(fam(&ShufflingMethod::rev(), 4), vec![p("4321")]);
        assert!(fam(&ShufflingMethod::cuts(), 1).is_empty());
    }

    #[test]
    fn family_invariants() {
        for b in Builtin::ALL {
            let m = ShufflingMethod::builtin(b);
            for n in 2..=12 {
                for s in m.family(n).iter() {
                    assert_eq!(s.len(), n);
                    assert!(!s.is_identity(), "{b:?} {s}");
                }
            }
        }
        let cuts = ShufflingMethod::cuts();
        for n in 2..=12 {
            assert_eq!(cuts.family(n).len(), n - 1);
        }
        let monge = ShufflingMethod::monge();
        for n in (3..=19).step_by(2) {
            assert_eq!(monge.single(n).unwrap().at(n) as usize, n);
        }
        for m in [ShufflingMethod::monge(), ShufflingMethod::in_shuffle()] {
            for k in 1..=9 {
                let even = m.single(2 * k).unwrap();
                let odd = m.single(2 * k + 1).unwrap();
                assert_eq!(even.as_slice(), &odd.as_slice()[..2 * k]);
            }
        }
    }

    #[test]
    fn predicates() {
        assert!(ShufflingMethod::rev().is_back_front(10));
        assert!(ShufflingMethod::top_bottom().is_back_front(10));
        assert!(!ShufflingMethod::cuts().is_back_front(3));

        assert!(ShufflingMethod::cuts().is_irreducible_family(8));
        assert!(ShufflingMethod::top_bottom().is_irreducible_family(8));
        let custom = ShufflingMethod::custom(
            "c",
            BTreeMap::from([(2, vec![p("21")]), (3, vec![p("132")])]),
        )
        .unwrap();
        assert!(!custom.is_irreducible_family(3));

        assert!(ShufflingMethod::cuts().satisfies_ending_condition(8));
        assert!(!ShufflingMethod::in_shuffle().satisfies_ending_condition(3));
        assert!(!ShufflingMethod::rev().satisfies_ending_condition(3));

        assert!(ShufflingMethod::cuts().is_closed_under_star(8));
        assert!(ShufflingMethod::rev().is_closed_under_star(8));
        assert!(ShufflingMethod::top_bottom().is_closed_under_star(4));
    }

    #[test]
    fn custom_methods() {
        let m = ShufflingMethod::parse_custom("t", "2: 21\n").unwrap();
        assert_eq!(fam(&m, 2), vec![p("21")]);
        assert!(fam(&m, 3).is_empty());

        assert!(matches!(
            ShufflingMethod::parse_custom("t", "2: 12"),
            Err(Error::InvalidMethod(_))
        ));
        assert!(ShufflingMethod::parse_custom("t", "3: 21").is_err());
        assert!(ShufflingMethod::parse_custom("t", "3: 231 ; 231").is_err());
        assert!(ShufflingMethod::parse_custom("t", "3 231").is_err());

        let m = ShufflingMethod::parse_custom(
            "t",
            "# the cuts of size 3\n3: 2,3,1 ; 3 1 2   # two rotations\n4:\n",
        )
        .unwrap();
        let mut a = fam(&m, 3);
        let mut b = fam(&ShufflingMethod::cuts(), 3);
        a.sort();
        b.sort();
        assert_eq!(a, b);
        assert!(fam(&m, 4).is_empty());
    }

    #[test]
    fn names() {
        for b in Builtin::ALL {
            assert_eq!(ShufflingMethod::by_name(b.name()).unwrap().builtin_kind(), Some(b));
        }
        assert!(matches!(
            ShufflingMethod::by_name("faro"),
            Err(Error::UnknownMethod(_))
        ));
    }
}
