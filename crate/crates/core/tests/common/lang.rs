//! Regular expressions over clause ids with a direct membership test, used
//! as an oracle for the automata.

use adcl::automata::LangMap;
use adcl::chc::ClauseId;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone)]
pub enum Re {
    Letter(ClauseId),
    Concat(Vec<Re>),
    Plus(Box<Re>),
}

impl Re {
    pub fn matches(&self, w: &[ClauseId]) -> bool {
        match self {
            Re::Letter(a) => w == [*a],
            Re::Concat(parts) => match parts.split_first() {
                None => w.is_empty(),
                Some((first, rest)) => {
                    let rest = Re::Concat(rest.to_vec());
                    (0..=w.len()).any(|i| first.matches(&w[..i]) && rest.matches(&w[i..]))
                }
            },
            // Languages here never contain the empty word, so every
            // iteration consumes at least one letter.
            Re::Plus(r) => (1..=w.len()).any(|i| r.matches(&w[..i]) && (i == w.len() || self.matches(&w[i..]))),
        }
    }
}

impl Re {
    /// Every word of the language with at most `max_len` letters, built
    /// from the expression itself.
    pub fn words(&self, max_len: usize) -> BTreeSet<Vec<ClauseId>> {
        match self {
            Re::Letter(a) if max_len >= 1 => BTreeSet::from([vec![*a]]),
            Re::Letter(_) => BTreeSet::new(),
            Re::Concat(parts) => {
                let mut acc: BTreeSet<Vec<ClauseId>> = BTreeSet::from([Vec::new()]);
                for p in parts {
                    let ws = p.words(max_len);
                    acc = acc
                        .iter()
                        .flat_map(|a| ws.iter().filter(|w| a.len() + w.len() <= max_len).map(move |w| [a.as_slice(), w].concat()))
                        .collect();
                }
                acc
            }
            Re::Plus(r) => {
                let base = r.words(max_len);
                let mut all = base.clone();
                let mut frontier = base.clone();
                while !frontier.is_empty() {
                    let mut next = BTreeSet::new();
                    for a in &frontier {
                        for w in &base {
                            if a.len() + w.len() <= max_len {
                                let aw = [a.as_slice(), w].concat();
                                if all.insert(aw.clone()) {
                                    next.insert(aw);
                                }
                            }
                        }
                    }
                    frontier = next;
                }
                all
            }
        }
    }

    pub fn shortest(&self) -> usize {
        match self {
            Re::Letter(_) => 1,
            Re::Concat(parts) => parts.iter().map(Re::shortest).sum(),
            Re::Plus(r) => r.shortest(),
        }
    }
}

/// Is every word of `a` with at most `slack` letters more than its
/// shortest word also in `b`?
pub fn included_enum(a: &Re, b: &Re, slack: usize) -> bool {
    a.words(a.shortest() + slack).iter().all(|w| b.matches(w))
}

/// All words over `alphabet` of length 1 to `max_len`.
pub fn all_words(alphabet: &[ClauseId], max_len: usize) -> Vec<Vec<ClauseId>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<ClauseId>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| alphabet.iter().map(move |a| [w.as_slice(), &[*a]].concat()))
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// A random map: `originals` letters and a few learned clauses over
/// random words of earlier ids. Returns the map and the expression of
/// every id.
pub struct LangConfig {
    pub map: LangMap,
    pub res: BTreeMap<ClauseId, Re>,
    pub originals: Vec<ClauseId>,
    pub learned: Vec<ClauseId>,
}

pub fn random_word(rng: &mut ChaCha8Rng, ids: &[ClauseId], max_len: usize) -> Vec<ClauseId> {
    let n = rng.gen_range(1..=max_len);
    (0..n).map(|_| ids[rng.gen_range(0..ids.len())]).collect()
}

pub fn random_config(rng: &mut ChaCha8Rng) -> LangConfig {
    let mut map = LangMap::new();
    let mut res = BTreeMap::new();
    let originals: Vec<ClauseId> = (1..=rng.gen_range(1..=3)).collect();
    for id in &originals {
        map.register_original(*id).unwrap();
        res.insert(*id, Re::Letter(*id));
    }
    let mut learned = Vec::new();
    for k in 0..rng.gen_range(1..=3) {
        let id = 100 + k;
        let ids: Vec<ClauseId> = res.keys().copied().collect();
        let w = random_word(rng, &ids, 3);
        map.register_learned(id, &w).unwrap();
        res.insert(id, Re::Plus(Box::new(Re::Concat(w.iter().map(|i| res[i].clone()).collect()))));
        learned.push(id);
    }
    LangConfig { map, res, originals, learned }
}

impl LangConfig {
    pub fn word_re(&self, w: &[ClauseId]) -> Re {
        Re::Concat(w.iter().map(|i| self.res[i].clone()).collect())
    }

    /// Oracle for `accel_redundant` and `covered_check` on `w`, deciding
    /// inclusion by enumerating the left language up to `slack` letters
    /// beyond its shortest word.
    pub fn oracle(&self, w: &[ClauseId], slack: usize) -> (bool, bool) {
        let lang = self.word_re(w);
        let plus = Re::Plus(Box::new(lang.clone()));
        let redundant = self.learned.iter().any(|l| included_enum(&plus, &self.res[l], slack));
        let covered = match w {
            [id] if self.learned.contains(id) => false,
            [id] => self.learned.iter().any(|l| l != id && included_enum(&lang, &self.res[l], slack)),
            _ => self.learned.iter().any(|l| included_enum(&lang, &self.res[l], slack)),
        };
        (redundant, covered)
    }
}
