use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

/// Letters are symbol ids handed out by [`super::LangMap`].
pub type Symbol = u64;

/// Nondeterministic automaton without epsilon transitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    states: usize,
    initial: BTreeSet<usize>,
    accepting: BTreeSet<usize>,
    delta: Vec<BTreeMap<Symbol, BTreeSet<usize>>>,
}

impl Nfa {
    /// Accepts exactly the given word.
    pub fn word(w: &[Symbol]) -> Nfa {
        let mut delta = vec![BTreeMap::new(); w.len() + 1];
        for (i, s) in w.iter().enumerate() {
            delta[i].insert(*s, BTreeSet::from([i + 1]));
        }
        Nfa {
            states: w.len() + 1,
            initial: BTreeSet::from([0]),
            accepting: BTreeSet::from([w.len()]),
            delta,
        }
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    fn accepts_empty(&self) -> bool {
        self.initial.iter().any(|q| self.accepting.contains(q))
    }

    fn add(&mut self, from: usize, s: Symbol, to: usize) {
        self.delta[from].entry(s).or_default().insert(to);
    }

    /// L(self)·L(other).
    pub fn concat(&self, other: &Nfa) -> Nfa {
        let off = self.states;
        let mut delta = self.delta.clone();
        for row in &other.delta {
            delta.push(row.iter().map(|(s, ts)| (*s, ts.iter().map(|t| t + off).collect())).collect());
        }
        let mut out = Nfa {
            states: self.states + other.states,
            initial: self.initial.clone(),
            accepting: other.accepting.iter().map(|q| q + off).collect(),
            delta,
        };
        if self.accepts_empty() {
            out.initial.extend(other.initial.iter().map(|q| q + off));
        }
        if other.accepts_empty() {
            out.accepting.extend(self.accepting.iter().copied());
        }
        // Entering an accepting state of `self` may instead enter `other`.
        for q in 0..self.states {
            for (s, ts) in &self.delta[q] {
                if ts.iter().any(|t| self.accepting.contains(t)) {
                    for i in &other.initial {
                        out.add(q, *s, i + off);
                    }
                }
            }
        }
        out
    }

    /// L(self)⁺.
    pub fn plus(&self) -> Nfa {
        let mut out = self.clone();
        for q in 0..self.states {
            for (s, ts) in &self.delta[q] {
                if ts.iter().any(|t| self.accepting.contains(t)) {
                    for i in &self.initial {
                        out.add(q, *s, *i);
                    }
                }
            }
        }
        out
    }

    fn step(&self, from: &BTreeSet<usize>, s: Symbol) -> BTreeSet<usize> {
        from.iter()
            .filter_map(|q| self.delta[*q].get(&s))
            .flatten()
            .copied()
            .collect()
    }

    pub fn accepts(&self, w: &[Symbol]) -> bool {
        let mut cur = self.initial.clone();
        for s in w {
            cur = self.step(&cur, *s);
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    /// L(self) ⊆ L(other), by exploring pairs of a state of `self` and a
    /// subset of `other`'s states.
    pub fn included_in(&self, other: &Nfa) -> bool {
        let mut seen: BTreeSet<(usize, BTreeSet<usize>)> = BTreeSet::new();
        let mut queue = VecDeque::new();
        for q in &self.initial {
            queue.push_back((*q, other.initial.clone()));
        }
        while let Some((q, set)) = queue.pop_front() {
            if !seen.insert((q, set.clone())) {
                continue;
            }
            if self.accepting.contains(&q) && !set.iter().any(|p| other.accepting.contains(p)) {
                return false;
            }
            for (s, ts) in &self.delta[q] {
                let next = other.step(&set, *s);
                for t in ts {
                    queue.push_back((*t, next.clone()));
                }
            }
        }
        true
    }

    /// All accepted words of length at most `max_len`, shortest first.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<Symbol>> {
        let mut out = Vec::new();
        let mut layer: Vec<(Vec<Symbol>, BTreeSet<usize>)> = vec![(Vec::new(), self.initial.clone())];
        for len in 0..=max_len {
            let mut next_layer = Vec::new();
            for (w, set) in &layer {
                if set.iter().any(|q| self.accepting.contains(q)) {
                    out.push(w.clone());
                }
                if len == max_len {
                    continue;
                }
                let letters: BTreeSet<Symbol> = set.iter().flat_map(|q| self.delta[*q].keys().copied()).collect();
                for s in letters {
                    let mut w2 = w.clone();
                    w2.push(s);
                    next_layer.push((w2, self.step(set, s)));
                }
            }
            layer = next_layer;
        }
        out
    }

    /// Graphviz rendering, labelling letters with `label`.
    pub fn to_dot(&self, name: &str, label: &dyn Fn(Symbol) -> String) -> String {
        let mut out = format!("digraph \"{name}\" {{\n  rankdir=LR;\n");
        for q in 0..self.states {
            let shape = if self.accepting.contains(&q) { "doublecircle" } else { "circle" };
            writeln!(out, "  q{q} [shape={shape}];").unwrap();
        }
        for (k, q) in self.initial.iter().enumerate() {
            writeln!(out, "  init{k} [shape=point];\n  init{k} -> q{q};").unwrap();
        }
        for (q, row) in self.delta.iter().enumerate() {
            for (s, ts) in row {
                for t in ts {
                    writeln!(out, "  q{q} -> q{t} [label=\"{}\"];", label(*s)).unwrap();
                }
            }
        }
        out.push_str("}\n");
        out
    }
}
