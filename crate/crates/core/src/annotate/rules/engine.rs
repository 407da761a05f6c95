use std::collections::{BTreeMap, HashMap};

use super::{Action, FeatureValue, Pattern, Phase, TokenTest};
use crate::annotate::{content_tokens, Annotation, AnnotationSet, AnnotationSource, Token};
use crate::span::Span;

type Bindings = Vec<(String, usize, usize)>;

struct Matcher<'a> {
    tokens: &'a [Token],
    /// Annotations by the index of the token they start on, with the token
    /// index just past their end.
    anns_at: HashMap<usize, Vec<(&'a Annotation, usize)>>,
}

impl<'a> Matcher<'a> {
    fn new(tokens: &'a [Token], existing: &'a AnnotationSet) -> Self {
        let start_idx: HashMap<usize, usize> =
            tokens.iter().enumerate().map(|(i, t)| (t.span.start, i)).collect();
        let end_idx: HashMap<usize, usize> =
            tokens.iter().enumerate().map(|(i, t)| (t.span.end, i + 1)).collect();
        let mut anns_at: HashMap<usize, Vec<(&Annotation, usize)>> = HashMap::new();
        for a in existing.annotations() {
            if let (Some(&s), Some(&e)) = (start_idx.get(&a.span.start), end_idx.get(&a.span.end)) {
                if s < e {
                    anns_at.entry(s).or_default().push((a, e));
                }
            }
        }
        Matcher { tokens, anns_at }
    }

    fn token_ok(&self, tests: &[TokenTest], pos: usize) -> bool {
        let Some(t) = self.tokens.get(pos) else {
            return false;
        };
        tests.iter().all(|test| match test {
            TokenTest::Kind(k) => t.kind == *k,
            TokenTest::Orth(o) => t.orth == *o,
            TokenTest::Surface(s) => t.surface == *s,
        })
    }

    /// Every way `p` can match from `pos`, as (end, bindings), in preference
    /// order (greedy first). Only the first state per end position is kept.
    fn states(&self, p: &Pattern, pos: usize, binds: &Bindings) -> Vec<(usize, Bindings)> {
        match p {
            Pattern::Token(tests) => {
                if self.token_ok(tests, pos) {
                    vec![(pos + 1, binds.clone())]
                } else {
                    Vec::new()
                }
            }
            Pattern::Annotation { ann_type, features } => {
                let mut out = Vec::new();
                for (a, end) in self.anns_at.get(&pos).into_iter().flatten() {
                    let ok = a.ann_type == *ann_type
                        && features.iter().all(|(k, v)| a.feature(k) == Some(v.as_str()));
                    if ok {
                        out.push((*end, binds.clone()));
                    }
                }
                // longest annotation first
                out.sort_by_key(|e| std::cmp::Reverse(e.0));
                dedup_by_end(out)
            }
            Pattern::Seq(items) => {
                let mut frontier = vec![(pos, binds.clone())];
                for item in items {
                    let mut next = Vec::new();
                    for (p, b) in &frontier {
                        next.extend(self.states(item, *p, b));
                    }
                    frontier = dedup_by_end(next);
                    if frontier.is_empty() {
                        break;
                    }
                }
                frontier
            }
            Pattern::Alt(alts) => {
                let mut out = Vec::new();
                for a in alts {
                    out.extend(self.states(a, pos, binds));
                }
                dedup_by_end(out)
            }
            Pattern::Repeat { inner, min, max } => {
                // levels[k] = states after exactly k repetitions
                let mut levels: Vec<Vec<(usize, Bindings)>> = vec![vec![(pos, binds.clone())]];
                loop {
                    let k = levels.len() - 1;
                    if max.is_some_and(|m| k >= m) {
                        break;
                    }
                    let mut next = Vec::new();
                    for (p, b) in &levels[k] {
                        next.extend(
                            self.states(inner, *p, b)
                                .into_iter()
                                .filter(|(e, _)| *e > *p),
                        );
                    }
                    let next = dedup_by_end(next);
                    if next.is_empty() {
                        break;
                    }
                    levels.push(next);
                }
                let mut out = Vec::new();
                for level in levels.into_iter().skip(*min).rev() {
                    out.extend(level);
                }
                dedup_by_end(out)
            }
            Pattern::Bind { inner, name } => self
                .states(inner, pos, binds)
                .into_iter()
                .map(|(end, mut b)| {
                    b.retain(|(n, _, _)| n != name);
                    b.push((name.clone(), pos, end));
                    (end, b)
                })
                .collect(),
        }
    }

    /// Longest non-empty match from `pos`.
    fn longest(&self, p: &Pattern, pos: usize) -> Option<(usize, Bindings)> {
        let mut best: Option<(usize, Bindings)> = None;
        for (end, b) in self.states(p, pos, &Vec::new()) {
            if end > pos && best.as_ref().is_none_or(|(e, _)| end > *e) {
                best = Some((end, b));
            }
        }
        best
    }

    fn span(&self, first: usize, last: usize) -> Span {
        Span::new(self.tokens[first].span.start, self.tokens[last - 1].span.end)
    }
}

fn dedup_by_end(states: Vec<(usize, Bindings)>) -> Vec<(usize, Bindings)> {
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for (end, b) in states {
        if !seen.contains(&end) {
            seen.push(end);
            out.push((end, b));
        }
    }
    out
}

fn fire(
    action: &Action,
    rule: &str,
    m: &Matcher,
    text: &str,
    whole: Span,
    binds: &Bindings,
    out: &mut AnnotationSet,
) {
    let bound = |name: &str| {
        binds
            .iter()
            .rev()
            .find(|(n, _, _)| n == name)
            .filter(|(_, s, e)| s < e)
            .map(|(_, s, e)| m.span(*s, *e))
    };
    let span = match &action.target {
        None => whole,
        Some(b) => match bound(b) {
            Some(s) => s,
            None => return,
        },
    };
    let mut features = BTreeMap::new();
    for (k, v) in &action.features {
        match v {
            FeatureValue::Literal(s) => {
                features.insert(k.clone(), s.clone());
            }
            FeatureValue::Binding(b) => {
                if let Some(s) = bound(b) {
                    features.insert(k.clone(), s.slice(text).to_owned());
                }
            }
        }
    }
    out.add(span, action.ann_type.clone(), features, AnnotationSource::Rule(rule.to_owned()));
}

/// Applies one phase to `text`. Scanning is left to right; at each position
/// the longest match over all rules fires (ties: higher priority, then rule
/// order) and scanning resumes after it. Rules see only `existing`; the
/// result is `existing` plus the new annotations.
pub fn run_phase(phase: &Phase, text: &str, existing: &AnnotationSet) -> AnnotationSet {
    let tokens = content_tokens(text);
    run_phase_on_tokens(phase, text, &tokens, existing)
}

pub(crate) fn run_phase_on_tokens(
    phase: &Phase,
    text: &str,
    tokens: &[Token],
    existing: &AnnotationSet,
) -> AnnotationSet {
    let m = Matcher::new(tokens, existing);
    let mut out = existing.clone();
    let mut pos = 0;
    while pos < tokens.len() {
        let mut best: Option<(usize, i64, usize, Bindings)> = None;
        for (order, rule) in phase.rules().iter().enumerate() {
            let Some((end, binds)) = m.longest(&rule.lhs, pos) else {
                continue;
            };
            let better = match &best {
                None => true,
                Some((be, bp, _, _)) => end > *be || (end == *be && rule.priority > *bp),
            };
            if better {
                best = Some((end, rule.priority, order, binds));
            }
        }
        match best {
            Some((end, _, order, binds)) => {
                let rule = &phase.rules()[order];
                let whole = m.span(pos, end);
                for action in &rule.rhs {
                    fire(action, &rule.name, &m, text, whole, &binds, &mut out);
                }
                pos = end;
            }
            None => pos += 1,
        }
    }
    out
}
