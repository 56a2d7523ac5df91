mod common;

use common::{arcs_of, load};
use eudsplit::bracket::{decode, encode};
use eudsplit::collate::{apply_to_sentence, collate, CollationPolicy, Forests};
use eudsplit::graph::DepForest;
use eudsplit::split::{split_sentence, Mode, SplitConfig, SplitResult, TreeKind};

fn fixed(name: &str) -> SplitResult {
    split_sentence(&load(name), &SplitConfig::with_mode(Mode::Fixed))
}

fn owned(arcs: &[(usize, &str)]) -> Vec<(usize, String)> {
    arcs.iter().map(|&(h, l)| (h, l.to_owned())).collect()
}

const PINCHERS_BASIC: [(usize, &str); 10] = [
    (2, "nsubj"),
    (0, "root"),
    (7, "mark"),
    (7, "nsubj"),
    (7, "cop"),
    (7, "compound"),
    (2, "advcl:-4"),
    (0, "root"),
    (10, "aux:pass"),
    (7, "acl:relcl"),
];

#[test]
fn tape_sentence_basic_tree() {
    let r = fixed("tape.conllu");
    assert_eq!(
        arcs_of(&r.basic),
        owned(&[
            (2, "det"),
            (5, "nsubj"),
            (5, "cop"),
            (5, "det"),
            (0, "root"),
            (7, "mark"),
            (5, "acl:-1"),
            (7, "obj"),
        ])
    );
    // Only one incoming edge per token, so every tree is the basic one.
    for kind in TreeKind::ALL {
        assert_eq!(r.forest(kind), &r.basic, "{}", kind);
    }
    assert!(r.repairs.is_empty());
}

#[test]
fn relative_pronoun_is_rooted_in_basic_and_ref_attached_in_relative() {
    let r = fixed("pinchers.conllu");
    assert_eq!(arcs_of(&r.basic), owned(&PINCHERS_BASIC));

    let mut relative = PINCHERS_BASIC;
    relative[7] = (7, "ref");
    assert_eq!(arcs_of(&r.relative), owned(&relative));
}

#[test]
fn relative_tree_is_the_same_in_faithful_mode() {
    let r = split_sentence(&load("pinchers.conllu"), &SplitConfig::default());
    assert_eq!(arcs_of(&r.basic), owned(&PINCHERS_BASIC));
    assert_eq!(r.relative.parent(8).head, 7);
    // The referent's passive subject edge only exists in fixed mode.
    assert_eq!(r.control, r.basic);
}

#[test]
fn referent_subject_edge_goes_to_control_tree_in_fixed_mode() {
    let r = fixed("pinchers.conllu");
    assert_eq!(r.control.parent(7).head, 10);
    assert_eq!(r.control.parent(7).label, "nsubj:pass");
    r.control.validate().unwrap();
}

#[test]
fn coordinated_adjectives() {
    let r = fixed("version.conllu");
    let base = [
        (5, "det"),
        (5, "amod"),
        (4, "cc"),
        (2, "conj:-1"),
        (7, "nsubj:pass"),
        (7, "aux:pass"),
        (0, "root"),
    ];
    assert_eq!(arcs_of(&r.basic), owned(&base));
    let mut conjunct = base;
    conjunct[3] = (5, "amod");
    assert_eq!(arcs_of(&r.conjunct), owned(&conjunct));
}

const ASSUME_BASIC: [(usize, &str); 11] = [
    (2, "nsubj"),
    (0, "root"),
    (4, "nsubj"),
    (2, "ccomp"),
    (6, "nmod:poss"),
    (4, "obj"),
    (10, "cc"),
    (10, "aux"),
    (10, "advmod"),
    (4, "conj:-3"),
    (10, "obj"),
];

#[test]
fn shared_subject_below_ccomp() {
    let r = fixed("assume.conllu");
    assert_eq!(arcs_of(&r.basic), owned(&ASSUME_BASIC));
    let mut control = ASSUME_BASIC;
    control[2] = (10, "nsubj");
    assert_eq!(arcs_of(&r.control), owned(&control));

    let mut conjunct = ASSUME_BASIC;
    conjunct[9] = (2, "ccomp");
    assert_eq!(arcs_of(&r.conjunct), owned(&conjunct));
}

#[test]
fn faithful_mode_skips_ccomp_control() {
    let r = split_sentence(&load("assume.conllu"), &SplitConfig::default());
    assert_eq!(arcs_of(&r.control), owned(&ASSUME_BASIC));
}

#[test]
fn bracket_row_of_church_sentence() {
    let s = load("church.conllu");
    let tree = DepForest::from_basic(&s).unwrap();
    let labels = encode(&tree);
    assert_eq!(labels.bracket_row(), "_ <\\ <\\ / < <\\\\> / <\\>");
    let back = decode(&labels);
    assert_eq!(back.forest, tree);
    assert_eq!(back.repairs, 0);
}

#[test]
fn examples_collate_back_to_their_graphs() {
    let policy = CollationPolicy {
        drop_extra_roots: true,
        ..CollationPolicy::default()
    };
    for name in [
        "tape.conllu",
        "pinchers.conllu",
        "version.conllu",
        "assume.conllu",
        "church.conllu",
    ] {
        let s = load(name);
        let r = split_sentence(&s, &SplitConfig::with_mode(Mode::Fixed));
        let forests: Forests = TreeKind::ALL.iter().map(|&k| (k, r.forest(k))).collect();
        let c = collate(&forests, &s, &policy);
        assert!(c.warnings.is_empty(), "{}", name);
        assert_eq!(apply_to_sentence(&c.graph, &s), s, "{}", name);
    }
}
