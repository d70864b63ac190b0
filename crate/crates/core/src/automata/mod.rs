//! Regular languages over sip variants, used as a cheap sufficient check
//! for redundancy of clause sequences.
//!
//! Every original clause variant is a letter. A learned clause accelerated
//! from the suffix `w₁ … w_k` gets the language `(L(w₁)…L(w_k))⁺`. A
//! sequence is redundant with respect to a learned clause when its
//! language is included in the learned clause's language.

mod nfa;

pub use nfa::{Nfa, Symbol};

use crate::chc::ClauseId;
use crate::formula::{CanonLit, Literal};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("clause {0} already has a language")]
    DuplicateId(ClauseId),
    #[error("clause {0} has no language")]
    UnknownId(ClauseId),
}

#[derive(Debug, Default, Clone)]
pub struct LangMap {
    langs: BTreeMap<ClauseId, Nfa>,
    learned: BTreeSet<ClauseId>,
    variants: HashMap<(ClauseId, Vec<CanonLit>), ClauseId>,
}

/// Key of a conjunctive implicant: the sorted multiset of canonical literals.
pub fn implicant_key(lits: &[Literal]) -> Vec<CanonLit> {
    let mut key: Vec<CanonLit> = lits.iter().map(Literal::canonical_key).collect();
    key.sort();
    key
}

impl LangMap {
    pub fn new() -> LangMap {
        LangMap::default()
    }

    /// The id of the variant of `parent` with implicant `lits`. Variants are
    /// interned: the first sighting takes an id from `fresh` and registers
    /// it as an original.
    pub fn variant(&mut self, parent: ClauseId, lits: &[Literal], fresh: impl FnOnce() -> ClauseId) -> ClauseId {
        let key = (parent, implicant_key(lits));
        if let Some(id) = self.variants.get(&key) {
            return *id;
        }
        let id = fresh();
        self.register_original(id).expect("fresh variant id");
        self.variants.insert(key, id);
        id
    }

    pub fn register_original(&mut self, id: ClauseId) -> Result<(), LangError> {
        if self.langs.contains_key(&id) {
            return Err(LangError::DuplicateId(id));
        }
        self.langs.insert(id, Nfa::word(&[id]));
        Ok(())
    }

    pub fn register_learned(&mut self, id: ClauseId, suffix: &[ClauseId]) -> Result<(), LangError> {
        if self.langs.contains_key(&id) {
            return Err(LangError::DuplicateId(id));
        }
        let lang = self.word_language(suffix)?.plus();
        self.langs.insert(id, lang);
        self.learned.insert(id);
        Ok(())
    }

    pub fn contains(&self, id: ClauseId) -> bool {
        self.langs.contains_key(&id)
    }

    pub fn is_learned(&self, id: ClauseId) -> bool {
        self.learned.contains(&id)
    }

    pub fn language(&self, id: ClauseId) -> Option<&Nfa> {
        self.langs.get(&id)
    }

    pub fn learned_count(&self) -> usize {
        self.learned.len()
    }

    /// `L(w₁)…L(w_k)`.
    pub fn word_language(&self, word: &[ClauseId]) -> Result<Nfa, LangError> {
        let mut parts = word.iter().map(|id| self.langs.get(id).ok_or(LangError::UnknownId(*id)));
        let first = parts.next().unwrap_or(Err(LangError::UnknownId(0)))?.clone();
        parts.try_fold(first, |acc, l| Ok(acc.concat(l?)))
    }

    fn included_in_learned(&self, lang: &Nfa, except: Option<ClauseId>) -> bool {
        self.learned
            .iter()
            .filter(|id| Some(**id) != except)
            .any(|id| lang.included_in(&self.langs[id]))
    }

    /// Would accelerating `suffix` learn nothing new, i.e. is `L(suffix)⁺`
    /// included in the language of a learned clause? Unknown ids are never
    /// redundant.
    pub fn accel_redundant(&self, suffix: &[ClauseId]) -> bool {
        if self.learned.is_empty() {
            return false;
        }
        match self.word_language(suffix) {
            Ok(l) => self.included_in_learned(&l.plus(), None),
            Err(_) => false,
        }
    }

    /// May the trace suffix `suffix` be blocked as covered? Longer suffixes
    /// need inclusion in a learned language. A single clause must be an
    /// original included in a learned language: originals have singleton
    /// languages while learned ones are infinite, so the inclusion is
    /// strict.
    pub fn covered_check(&self, suffix: &[ClauseId]) -> bool {
        if self.learned.is_empty() {
            return false;
        }
        match self.word_language(suffix) {
            Ok(l) => self.covered_lang(suffix, &l),
            Err(_) => false,
        }
    }

    fn covered_lang(&self, suffix: &[ClauseId], l: &Nfa) -> bool {
        match suffix {
            [id] => !self.is_learned(*id) && self.included_in_learned(l, Some(*id)),
            _ => self.included_in_learned(l, None),
        }
    }

    /// [`covered_check`](Self::covered_check) of the suffixes of `word`,
    /// shortest first. The languages are built by prepending one letter at
    /// a time.
    pub fn covered_suffixes<'a>(&'a self, word: &'a [ClauseId]) -> impl Iterator<Item = bool> + 'a {
        let mut lang: Option<Nfa> = None;
        let mut known = !self.learned.is_empty();
        (1..=word.len()).map(move |k| {
            let suffix = &word[word.len() - k..];
            if !known {
                return false;
            }
            let Some(letter) = self.langs.get(&suffix[0]) else {
                known = false;
                return false;
            };
            let l = match lang.take() {
                None => letter.clone(),
                Some(rest) => letter.concat(&rest),
            };
            let covered = self.covered_lang(suffix, &l);
            lang = Some(l);
            covered
        })
    }

    /// Graphviz rendering of a clause's language.
    pub fn to_dot(&self, id: ClauseId) -> Option<String> {
        let nfa = self.langs.get(&id)?;
        Some(nfa.to_dot(&format!("L{id}"), &|s| format!("c{s}")))
    }
}
