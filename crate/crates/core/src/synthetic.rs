//! Template-generated English sentences with enhanced annotation.
//!
//! Every template keeps in-degree at most two, and every token with two
//! heads is covered by one of the split phenomena: relative clause
//! referents, conjunct propagation, or shared subjects below `xcomp` /
//! `ccomp`. Lexical items are drawn with a seeded RNG, so a seed fixes
//! the corpus.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conllu::{Sentence, Token};

const NOUNS: &[&str] = &[
    "dog", "cat", "teacher", "farmer", "robot", "child", "pilot", "baker", "doctor", "singer",
];
const OBJECTS: &[&str] = &[
    "book", "letter", "car", "song", "window", "cake", "map", "ticket", "painting", "box",
];
const PLACES: &[&str] = &["garden", "kitchen", "park", "station", "library", "market"];
const ADJECTIVES: &[&str] = &[
    "old", "small", "bright", "quiet", "green", "heavy", "strange",
];
/// (past tense, lemma) of transitive verbs.
const VERBS: &[(&str, &str)] = &[
    ("saw", "see"),
    ("found", "find"),
    ("painted", "paint"),
    ("sold", "sell"),
    ("opened", "open"),
    ("wrote", "write"),
    ("carried", "carry"),
    ("liked", "like"),
];
/// (past tense, lemma) of intransitive verbs.
const INTRANSITIVE: &[(&str, &str)] = &[
    ("slept", "sleep"),
    ("laughed", "laugh"),
    ("left", "leave"),
    ("smiled", "smile"),
    ("waited", "wait"),
    ("arrived", "arrive"),
];
/// Base forms for infinitives.
const INFINITIVES: &[&str] = &["buy", "read", "fix", "visit", "paint", "carry"];
const NAMES: &[&str] = &[
    "Anna", "Omar", "Lena", "Kofi", "Mara", "Ivan", "Sade", "Tom",
];
const PREPOSITIONS: &[&str] = &["in", "near", "behind", "at"];

struct Builder {
    tokens: Vec<Token>,
}

impl Builder {
    fn new() -> Self {
        Builder { tokens: Vec::new() }
    }

    fn word(&mut self, form: &str, lemma: &str, upos: &str) -> usize {
        let id = self.tokens.len() + 1;
        let mut t = Token::new(id, form);
        t.lemma = lemma.to_owned();
        t.upos = upos.to_owned();
        self.tokens.push(t);
        id
    }

    /// Basic arc, mirrored in the enhanced graph with `enhanced` as label.
    fn attach(&mut self, dep: usize, head: usize, deprel: &str, enhanced: &str) {
        self.basic_only(dep, head, deprel);
        self.edge(dep, head, enhanced);
    }

    fn plain(&mut self, dep: usize, head: usize, deprel: &str) {
        self.attach(dep, head, deprel, deprel);
    }

    fn basic_only(&mut self, dep: usize, head: usize, deprel: &str) {
        let t = &mut self.tokens[dep - 1];
        t.head = head;
        t.deprel = deprel.to_owned();
    }

    fn edge(&mut self, dep: usize, head: usize, label: &str) {
        self.tokens[dep - 1].deps.push((head, label.to_owned()));
    }

    fn finish(mut self, sent_id: String) -> Sentence {
        for t in &mut self.tokens {
            t.canonicalize_deps();
        }
        let mut s = Sentence::new(sent_id, self.tokens);
        if let Some(first) = s.tokens.first_mut() {
            let mut chars = first.form.chars();
            if let Some(c) = chars.next() {
                first.form = c.to_uppercase().chain(chars).collect();
            }
        }
        s.text = s
            .tokens
            .iter()
            .map(|t| t.form.as_str())
            .collect::<Vec<_>>()
            .join(" ");
        s.comments = vec![
            format!("# sent_id = {}", s.sent_id),
            format!("# text = {}", s.text),
        ];
        s
    }
}

/// The shapes the generator knows about.
#[derive(Clone, Copy, Debug, Eq, PartialEq)]
pub enum Template {
    /// Transitive clause with a prepositional `obl`.
    Oblique,
    /// Subject relative clause: the referent is also the subject inside.
    SubjectRelative,
    /// Object relative clause.
    ObjectRelative,
    /// Coordinated subjects sharing the verb.
    CoordinatedSubjects,
    /// Coordinated adjectives sharing the noun.
    CoordinatedAdjectives,
    /// Subject control below `xcomp`.
    Control,
    /// Coordinated clauses below `ccomp` sharing a subject.
    SharedComplementSubject,
    /// Coordinated main clauses: the second conjunct is also a root.
    CoordinatedClauses,
    /// Adnominal clause with a `mark`ed infinitive.
    MarkedClause,
    /// Nominal modifier with `of`.
    NominalModifier,
}

impl Template {
    pub const ALL: [Template; 10] = [
        Template::Oblique,
        Template::SubjectRelative,
        Template::ObjectRelative,
        Template::CoordinatedSubjects,
        Template::CoordinatedAdjectives,
        Template::Control,
        Template::SharedComplementSubject,
        Template::CoordinatedClauses,
        Template::MarkedClause,
        Template::NominalModifier,
    ];
}

fn pick<'a, T, R: Rng>(rng: &mut R, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("vocabulary lists are nonempty")
}

fn pick_two<'a, T, R: Rng>(rng: &mut R, items: &'a [T]) -> (&'a T, &'a T) {
    let mut chosen = items.choose_multiple(rng, 2);
    (chosen.next().unwrap(), chosen.next().unwrap())
}

/// Build one sentence of the given shape.
pub fn generate<R: Rng>(template: Template, rng: &mut R, sent_id: String) -> Sentence {
    let mut b = Builder::new();
    match template {
        Template::Oblique => {
            let noun = pick(rng, NOUNS);
            let (verb, vlemma) = pick(rng, VERBS);
            let obj = pick(rng, OBJECTS);
            let prep = pick(rng, PREPOSITIONS);
            let place = pick(rng, PLACES);
            let d1 = b.word("the", "the", "DET");
            let subj = b.word(noun, noun, "NOUN");
            let v = b.word(verb, vlemma, "VERB");
            let d2 = b.word("the", "the", "DET");
            let o = b.word(obj, obj, "NOUN");
            let p = b.word(prep, prep, "ADP");
            let d3 = b.word("the", "the", "DET");
            let pl = b.word(place, place, "NOUN");
            b.plain(d1, subj, "det");
            b.plain(subj, v, "nsubj");
            b.plain(v, 0, "root");
            b.plain(d2, o, "det");
            b.plain(o, v, "obj");
            b.plain(p, pl, "case");
            b.plain(d3, pl, "det");
            b.attach(pl, v, "obl", &format!("obl:{}", prep));
        }
        Template::SubjectRelative => {
            let noun = pick(rng, NOUNS);
            let (verb, vlemma) = pick(rng, VERBS);
            let obj = pick(rng, OBJECTS);
            let (main, mlemma) = pick(rng, INTRANSITIVE);
            let d1 = b.word("the", "the", "DET");
            let n = b.word(noun, noun, "NOUN");
            let who = b.word("who", "who", "PRON");
            let v = b.word(verb, vlemma, "VERB");
            let d2 = b.word("the", "the", "DET");
            let o = b.word(obj, obj, "NOUN");
            let m = b.word(main, mlemma, "VERB");
            b.plain(d1, n, "det");
            b.plain(n, m, "nsubj");
            b.edge(n, v, "nsubj");
            b.basic_only(who, v, "nsubj");
            b.edge(who, n, "ref");
            b.plain(v, n, "acl:relcl");
            b.plain(d2, o, "det");
            b.plain(o, v, "obj");
            b.plain(m, 0, "root");
        }
        Template::ObjectRelative => {
            let name = pick(rng, NAMES);
            let (verb, vlemma) = pick(rng, VERBS);
            let obj = pick(rng, OBJECTS);
            let other = pick(rng, NAMES);
            let (rverb, rlemma) = pick(rng, VERBS);
            let s = b.word(name, name, "PROPN");
            let v = b.word(verb, vlemma, "VERB");
            let d = b.word("the", "the", "DET");
            let o = b.word(obj, obj, "NOUN");
            let which = b.word("which", "which", "PRON");
            let s2 = b.word(other, other, "PROPN");
            let rv = b.word(rverb, rlemma, "VERB");
            b.plain(s, v, "nsubj");
            b.plain(v, 0, "root");
            b.plain(d, o, "det");
            b.plain(o, v, "obj");
            b.edge(o, rv, "obj");
            b.basic_only(which, rv, "obj");
            b.edge(which, o, "ref");
            b.plain(s2, rv, "nsubj");
            b.plain(rv, o, "acl:relcl");
        }
        Template::CoordinatedSubjects => {
            let (n1, n2) = pick_two(rng, NOUNS);
            let (verb, vlemma) = pick(rng, INTRANSITIVE);
            let d1 = b.word("the", "the", "DET");
            let a = b.word(n1, n1, "NOUN");
            let cc = b.word("and", "and", "CCONJ");
            let d2 = b.word("the", "the", "DET");
            let c = b.word(n2, n2, "NOUN");
            let v = b.word(verb, vlemma, "VERB");
            b.plain(d1, a, "det");
            b.plain(a, v, "nsubj");
            b.plain(cc, c, "cc");
            b.plain(d2, c, "det");
            b.attach(c, a, "conj", "conj:and");
            b.edge(c, v, "nsubj");
            b.plain(v, 0, "root");
        }
        Template::CoordinatedAdjectives => {
            let (a1, a2) = pick_two(rng, ADJECTIVES);
            let noun = pick(rng, OBJECTS);
            let (verb, vlemma) = pick(rng, INTRANSITIVE);
            let det = b.word("a", "a", "DET");
            let adj1 = b.word(a1, a1, "ADJ");
            let cc = b.word("or", "or", "CCONJ");
            let adj2 = b.word(a2, a2, "ADJ");
            let n = b.word(noun, noun, "NOUN");
            let v = b.word(verb, vlemma, "VERB");
            b.plain(det, n, "det");
            b.plain(adj1, n, "amod");
            b.plain(cc, adj2, "cc");
            b.attach(adj2, adj1, "conj", "conj:or");
            b.edge(adj2, n, "amod");
            b.plain(n, v, "nsubj");
            b.plain(v, 0, "root");
        }
        Template::Control => {
            let name = pick(rng, NAMES);
            let inf = pick(rng, INFINITIVES);
            let obj = pick(rng, OBJECTS);
            let s = b.word(name, name, "PROPN");
            let w = b.word("wanted", "want", "VERB");
            let to = b.word("to", "to", "PART");
            let v = b.word(inf, inf, "VERB");
            let d = b.word("the", "the", "DET");
            let o = b.word(obj, obj, "NOUN");
            b.plain(s, w, "nsubj");
            b.edge(s, v, "nsubj:xsubj");
            b.plain(w, 0, "root");
            b.plain(to, v, "mark");
            b.plain(v, w, "xcomp");
            b.plain(d, o, "det");
            b.plain(o, v, "obj");
        }
        Template::SharedComplementSubject => {
            let (name, other) = pick_two(rng, NAMES);
            let (v1, l1) = pick(rng, VERBS);
            let (v2, l2) = pick(rng, VERBS);
            let (o1, o2) = pick_two(rng, OBJECTS);
            let s = b.word(name, name, "PROPN");
            let think = b.word("thinks", "think", "VERB");
            let s2 = b.word(other, other, "PROPN");
            let a = b.word(v1, l1, "VERB");
            let d1 = b.word("the", "the", "DET");
            let n1 = b.word(o1, o1, "NOUN");
            let cc = b.word("and", "and", "CCONJ");
            let c = b.word(v2, l2, "VERB");
            let d2 = b.word("the", "the", "DET");
            let n2 = b.word(o2, o2, "NOUN");
            b.plain(s, think, "nsubj");
            b.plain(think, 0, "root");
            b.plain(s2, a, "nsubj");
            b.edge(s2, c, "nsubj");
            b.plain(a, think, "ccomp");
            b.plain(d1, n1, "det");
            b.plain(n1, a, "obj");
            b.plain(cc, c, "cc");
            b.attach(c, a, "conj", "conj:and");
            b.edge(c, think, "ccomp");
            b.plain(d2, n2, "det");
            b.plain(n2, c, "obj");
        }
        Template::CoordinatedClauses => {
            let (n1, n2) = pick_two(rng, NAMES);
            let (v1, l1) = pick(rng, INTRANSITIVE);
            let (v2, l2) = pick(rng, INTRANSITIVE);
            let a = b.word(n1, n1, "PROPN");
            let va = b.word(v1, l1, "VERB");
            let cc = b.word("but", "but", "CCONJ");
            let c = b.word(n2, n2, "PROPN");
            let vc = b.word(v2, l2, "VERB");
            b.plain(a, va, "nsubj");
            b.plain(va, 0, "root");
            b.plain(cc, vc, "cc");
            b.plain(c, vc, "nsubj");
            b.attach(vc, va, "conj", "conj:but");
            b.edge(vc, 0, "root");
        }
        Template::MarkedClause => {
            let noun = pick(rng, NOUNS);
            let inf = pick(rng, INFINITIVES);
            let obj = pick(rng, OBJECTS);
            let d1 = b.word("the", "the", "DET");
            let n = b.word(noun, noun, "NOUN");
            let was = b.word("found", "find", "VERB");
            let d2 = b.word("a", "a", "DET");
            let way = b.word("way", "way", "NOUN");
            let to = b.word("to", "to", "PART");
            let v = b.word(inf, inf, "VERB");
            let o = b.word(obj, obj, "NOUN");
            b.plain(d1, n, "det");
            b.plain(n, was, "nsubj");
            b.plain(was, 0, "root");
            b.plain(d2, way, "det");
            b.plain(way, was, "obj");
            b.plain(to, v, "mark");
            b.attach(v, way, "acl", "acl:to");
            b.plain(o, v, "obj");
        }
        Template::NominalModifier => {
            let noun = pick(rng, OBJECTS);
            let owner = pick(rng, NOUNS);
            let (verb, vlemma) = pick(rng, INTRANSITIVE);
            let d1 = b.word("the", "the", "DET");
            let n = b.word(noun, noun, "NOUN");
            let of = b.word("of", "of", "ADP");
            let d2 = b.word("the", "the", "DET");
            let m = b.word(owner, owner, "NOUN");
            let v = b.word(verb, vlemma, "VERB");
            b.plain(d1, n, "det");
            b.plain(n, v, "nsubj");
            b.plain(of, m, "case");
            b.plain(d2, m, "det");
            b.attach(m, n, "nmod", "nmod:of");
            b.plain(v, 0, "root");
        }
    }
    b.finish(sent_id)
}

/// `count` sentences cycling through all templates, with lexical items
/// drawn from a seeded RNG.
pub fn corpus(count: usize, seed: u64) -> Vec<Sentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let template = Template::ALL[i % Template::ALL.len()];
            generate(template, &mut rng, format!("synth-{:04}", i + 1))
        })
        .collect()
}

/// Seed of the curated suite used in the test suites and documentation.
pub const SUITE_SEED: u64 = 2021;

/// The 25-sentence curated suite.
pub fn curated_suite() -> Vec<Sentence> {
    corpus(25, SUITE_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sentences_are_valid() {
        for s in corpus(40, 7) {
            s.validate().unwrap();
            assert!(s.tokens.iter().all(|t| t.deps.len() <= 2));
            crate::graph::DepForest::from_basic(&s).unwrap();
        }
    }

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(corpus(12, 3), corpus(12, 3));
        assert_ne!(corpus(12, 3), corpus(12, 4));
    }

    #[test]
    fn every_template_has_multi_head_or_lexical_label() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for template in Template::ALL {
            let s = generate(template, &mut rng, "t".into());
            let interesting = s
                .tokens
                .iter()
                .any(|t| t.deps.len() > 1 || t.deps.iter().any(|(_, l)| l.contains(':')));
            assert!(interesting, "{:?}", template);
        }
    }
}
