import pytest

from epicdemo.automata import EPSILON, Letter, Nfa, finite_language, make_word, single_word
from epicdemo.constructions import (
    CosetTable,
    EdgeLetter,
    SyncTripleAutomaton,
    admissible_automaton,
    autostackable_projection,
    change_generators,
    cross_section_to_demo,
    extension,
    fi_overgroup,
    fi_subgroup,
    graph_product,
    make_triple,
    pad_triple_word,
    split_triple,
)
from epicdemo.demonstrations import Demonstration, finite_demo, z_demo, zk_demo
from epicdemo.graphproduct import VertexGraph
from epicdemo.groups import FreeAbelianOracle, IntegerMatrixOracle, PermutationOracle

from oracles import bf_pruned_types
from test_groups import heisenberg_oracle, s3_oracle, c2_oracle


# -- change of generators ------------------------------------------------


class TestChangeGenerators:
    def test_relabel_z(self):
        d = z_demo()
        b, binv = Letter("b"), Letter("b^-1")
        target = {b: make_word("a"), binv: make_word("a^-1")}
        phi = {Letter("a"): (b,), Letter("a^-1"): (binv,)}
        out = change_generators(d, target, phi)
        assert out.verify_no_identity(10) == []
        report = out.verify_coverage(10, 10)
        assert report.complete and report.clean

    def test_s3_over_two_generators(self):
        d = finite_demo(s3_oracle())
        t, r = Letter("(12)"), Letter("(123)")
        target = {t: (t,), r: (r,)}
        # search words over the two chosen generators for each old letter
        search = PermutationOracle(3, {t: d.oracle.gens[t], r: d.oracle.gens[r]})
        witnesses = {key: word for key, word in search.ball(6).items()}
        phi = {x: witnesses[d.evaluate((x,))] for x in d.language.alphabet}
        out = change_generators(d, target, phi)
        assert out.verify_no_identity(6) == []
        report = out.verify_coverage(1, 6)
        assert report.complete and report.clean
        # image containment: everything the new demo hits, the old one hit
        old_keys = {d.evaluate(w) for w in d.language.enumerate_words(1)}
        new_keys = {out.evaluate(w) for w in out.language.enumerate_words(6)}
        assert new_keys <= old_keys

    def test_empty_image_rejected(self):
        d = z_demo()
        b, binv = Letter("b"), Letter("b^-1")
        target = {b: make_word("a"), binv: make_word("a^-1")}
        with pytest.raises(ValueError):
            change_generators(d, target, {Letter("a"): EPSILON, Letter("a^-1"): (binv,)})

    def test_wrong_element_rejected(self):
        d = z_demo()
        b, binv = Letter("b"), Letter("b^-1")
        target = {b: make_word("a"), binv: make_word("a^-1")}
        phi = {Letter("a"): (b, b), Letter("a^-1"): (binv,)}
        with pytest.raises(ValueError):
            change_generators(d, target, phi)


# -- extensions ----------------------------------------------------------


def central_demo(oracle):
    """Powers of the central generator of the Heisenberg group."""
    lang = z_demo("z").language
    return Demonstration(oracle, {Letter("z"): make_word("z"),
                                  Letter("z^-1"): make_word("z^-1")}, lang)


def quotient_demo(oracle):
    """Sign-consistent x then y blocks, one representative per Z^2 coset."""
    lang = zk_demo(2, names=("x", "y")).language
    return Demonstration(oracle, {x: (x,) for x in lang.alphabet}, lang)


def in_center(key):
    rows = [r.split(",") for r in key.data.decode().split(";")]
    return rows[0][1] == "0" and rows[1][2] == "0"


class TestExtension:
    def test_heisenberg(self):
        oracle = heisenberg_oracle()
        out = extension(central_demo(oracle), quotient_demo(oracle), oracle, in_center)
        assert out.verify_no_identity(6) == []
        report = out.verify_coverage(2, 8)
        assert report.complete and report.clean

    def test_quotient_word_inside_subgroup_rejected(self):
        oracle = heisenberg_oracle()
        commutator = make_word("x", "y", "x^-1", "y^-1")
        bad_q = Demonstration(
            oracle, {x: (x,) for x in set(commutator)},
            single_word(commutator, tuple(dict.fromkeys(commutator))))
        with pytest.raises(ValueError, match="into the subgroup"):
            extension(central_demo(oracle), bad_q, oracle, in_center, check_len=4)

    def test_letter_clash_rejected(self):
        oracle = heisenberg_oracle()
        lang = z_demo("z").language
        clashing = Demonstration(oracle, {Letter("z"): make_word("z"),
                                          Letter("z^-1"): make_word("z^-1")}, lang)
        with pytest.raises(ValueError, match="disjoint"):
            extension(central_demo(oracle), clashing, oracle, in_center)

    def test_inverted_predicate_caught(self):
        oracle = heisenberg_oracle()
        with pytest.raises(ValueError, match="identity"):
            extension(central_demo(oracle), quotient_demo(oracle), oracle,
                      lambda key: not in_center(key))


# -- finite index overgroups --------------------------------------------


def dinf_oracle():
    """Infinite dihedral group as 2x2 integer matrices."""
    return IntegerMatrixOracle(2, {
        Letter("a"): ((1, 1), (0, 1)),
        Letter("a^-1"): ((1, -1), (0, 1)),
        Letter("s"): ((-1, 0), (0, 1)),
    })


def translations_demo(oracle):
    lang = z_demo().language
    return Demonstration(oracle, {Letter("a"): make_word("a"),
                                  Letter("a^-1"): make_word("a^-1")}, lang)


class TestFiOvergroup:
    def test_infinite_dihedral(self):
        oracle = dinf_oracle()
        out = fi_overgroup(translations_demo(oracle), oracle,
                           {Letter("s"): make_word("s")})
        assert out.verify_no_identity(10) == []
        report = out.verify_coverage(4, 10)
        assert report.complete and report.clean

    def test_identity_transversal_rejected(self):
        oracle = dinf_oracle()
        with pytest.raises(ValueError, match="identity"):
            fi_overgroup(translations_demo(oracle), oracle,
                         {Letter("t"): make_word("a", "a^-1")})

    def test_subgroup_transversal_rejected(self):
        oracle = dinf_oracle()

        def is_translation(key):
            return key.data.decode().split(";")[0].split(",")[0] == "1"

        with pytest.raises(ValueError, match="into the subgroup"):
            fi_overgroup(translations_demo(oracle), oracle,
                         {Letter("t"): make_word("a")}, in_subgroup=is_translation)

    def test_letter_clash_rejected(self):
        oracle = dinf_oracle()
        with pytest.raises(ValueError, match="clash"):
            fi_overgroup(translations_demo(oracle), oracle,
                         {Letter("a"): make_word("s")})


# -- finite index subgroups ---------------------------------------------


def even_table():
    a, ainv = Letter("a"), Letter("a^-1")
    return CosetTable(
        cosets=("H", "C"),
        transversal={"H": EPSILON, "C": (a,)},
        action={("H", a): "C", ("C", a): "H", ("H", ainv): "C", ("C", ainv): "H"},
    )


def a3_table():
    odd = [Letter("(12)"), Letter("(13)"), Letter("(23)")]
    even = [Letter("(123)"), Letter("(132)")]
    action = {}
    for x in odd:
        action[("H", x)] = "C"
        action[("C", x)] = "H"
    for x in even:
        action[("H", x)] = "H"
        action[("C", x)] = "C"
    return CosetTable(("H", "C"), {"H": EPSILON, "C": (Letter("(12)"),)}, action)


class TestFiSubgroup:
    def test_even_integers(self):
        out = fi_subgroup(z_demo(), even_table())
        assert out.verify_no_identity(6) == []
        report = out.verify_coverage(6, 6)
        covered = {int(k.data.decode()) for k in report.covered}
        assert covered == {-6, -4, -2, 2, 4, 6}
        assert report.clean

    def test_even_integers_rewrite_matches_spelling(self):
        demo = z_demo()
        out = fi_subgroup(demo, even_table())
        for w in out.language.enumerate_words(6):
            spelled = tuple(Letter(split_triple(x)[1]) for x in w)
            assert out.evaluate(w) == demo.oracle.evaluate(spelled)

    def test_alternating_subgroup_of_s3(self):
        demo = finite_demo(s3_oracle())
        out = fi_subgroup(demo, a3_table())
        assert out.verify_no_identity(4) == []
        report = out.verify_coverage(1, 2)
        rotations = {demo.oracle.evaluate(make_word("(123)")),
                     demo.oracle.evaluate(make_word("(132)"))}
        assert set(report.covered) == rotations
        assert set(report.missing) == {demo.oracle.evaluate((x,)) for x in
                                       (Letter("(12)"), Letter("(13)"), Letter("(23)"))}

    def test_index_one_degenerate(self):
        demo = z_demo()
        a, ainv = Letter("a"), Letter("a^-1")
        table = CosetTable(("H",), {"H": EPSILON},
                           {("H", a): "H", ("H", ainv): "H"})
        out = fi_subgroup(demo, table)
        report = out.verify_coverage(4, 4)
        base = demo.verify_coverage(4, 4)
        assert set(report.covered) == set(base.covered)

    def test_in_subgroup_predicate_validates_table(self):
        def even(key):
            return int(key.data.decode()) % 2 == 0

        out = fi_subgroup(z_demo(), even_table(), in_subgroup=even)
        assert out.verify_no_identity(4) == []

        # consistent 4-cycle that subdivides each genuine coset of 2Z in two
        a, ainv = Letter("a"), Letter("a^-1")
        names = ("H", "C1", "C2", "C3")
        action = {}
        for i, c in enumerate(names):
            action[(c, a)] = names[(i + 1) % 4]
            action[(c, ainv)] = names[(i - 1) % 4]
        bad = CosetTable(names, {c: (a,) * i for i, c in enumerate(names)}, action)
        with pytest.raises(ValueError, match="share a coset"):
            fi_subgroup(z_demo(), bad, in_subgroup=even)

    def test_partial_action_rejected(self):
        a, ainv = Letter("a"), Letter("a^-1")
        table = CosetTable(("H", "C"), {"H": EPSILON, "C": (a,)},
                           {("H", a): "C", ("C", a): "H"})
        with pytest.raises(ValueError, match="undefined"):
            fi_subgroup(z_demo(), table)

    def test_nontrivial_home_transversal_rejected(self):
        a, ainv = Letter("a"), Letter("a^-1")
        table = CosetTable(("H", "C"), {"H": (a,), "C": (a,)},
                           even_table().action)
        with pytest.raises(ValueError, match="must be empty"):
            fi_subgroup(z_demo(), table)

    def test_unreachable_coset_rejected(self):
        a, ainv = Letter("a"), Letter("a^-1")
        table = CosetTable(("H", "X"), {"H": EPSILON, "X": (a,)},
                           {("H", a): "H", ("H", ainv): "H",
                            ("X", a): "X", ("X", ainv): "X"})
        with pytest.raises(ValueError, match="unreachable"):
            fi_subgroup(z_demo(), table)

    def test_non_inverse_closed_alphabet_rejected(self):
        mono = FreeAbelianOracle(1, {Letter("a"): (1,)})
        lang = Nfa((Letter("a"),), frozenset({0, 1}),
                   frozenset({(0, Letter("a"), 1), (1, Letter("a"), 1)}),
                   frozenset({0}), frozenset({1}))
        demo = Demonstration(mono, {Letter("a"): (Letter("a"),)}, lang)
        table = CosetTable(("H",), {"H": EPSILON}, {("H", Letter("a")): "H"})
        with pytest.raises(ValueError, match="no inverse"):
            fi_subgroup(demo, table)


# -- admissible type automata -------------------------------------------


class TestAdmissibleAutomaton:
    def test_single_vertex(self):
        g = VertexGraph.make(("u",), [])
        adm = admissible_automaton(g)
        assert adm.enumerate_words(3) == [make_word("u")]

    def test_two_vertices_no_edge_alternate(self):
        g = VertexGraph.make(("u", "v"), [])
        adm = admissible_automaton(g)
        assert adm.enumerate_words(3) == [
            make_word("u"), make_word("v"),
            make_word("u", "v"), make_word("v", "u"),
            make_word("u", "v", "u"), make_word("v", "u", "v")]

    def test_two_vertices_with_edge(self):
        g = VertexGraph.make(("u", "v"), [("u", "v")])
        adm = admissible_automaton(g)
        assert adm.enumerate_words(3) == [
            make_word("u"), make_word("v"), make_word("u", "v")]

    def test_structure_for_gluing(self):
        g = VertexGraph.make(("u", "v", "w"), [("u", "v")])
        adm = admissible_automaton(g)
        assert len(adm.initials) == 1
        assert not adm.initials & adm.accepting
        assert adm.accepting == adm.states - adm.initials
        assert all(label is not None for (_, label, _) in adm.transitions)

    @pytest.mark.parametrize("vertices,edges", [
        (("u", "v", "w"), [("u", "v"), ("v", "w")]),
        (("u", "v", "w"), [("u", "v"), ("v", "w"), ("u", "w")]),
        (("p", "q", "r", "s"), [("p", "q"), ("q", "r"), ("r", "s"), ("s", "p")]),
    ])
    def test_matches_brute_force(self, vertices, edges):
        g = VertexGraph.make(vertices, edges)
        adm = admissible_automaton(g)
        got = {tuple(x.name for x in w) for w in adm.enumerate_words(6)}
        expected = bf_pruned_types(vertices, g.adjacent, 6)
        assert got == expected


# -- graph products ------------------------------------------------------


def c2_demo(name):
    return finite_demo(c2_oracle(name))


class TestGraphProduct:
    def test_square_group_words(self):
        g = VertexGraph.make(("u", "v"), [("u", "v")])
        out = graph_product(g, {"u": c2_demo("a"), "v": c2_demo("b")})
        assert out.language.enumerate_words(4) == [
            make_word("a"), make_word("b"), make_word("a", "b")]
        report = out.verify_coverage(2, 2)
        assert report.complete and report.clean
        assert len(report.covered) == 3

    def test_free_product_of_involutions(self):
        g = VertexGraph.make(("u", "v"), [])
        out = graph_product(g, {"u": c2_demo("a"), "v": c2_demo("b")})
        assert out.verify_no_identity(5) == []
        report = out.verify_coverage(4, 8)
        assert report.complete and report.clean

    def test_lamplighter_free_abelian_plane(self):
        g = VertexGraph.make(("u", "v"), [("u", "v")])
        out = graph_product(g, {"u": z_demo("a"), "v": z_demo("b")})
        assert out.verify_no_identity(5) == []
        report = out.verify_coverage(3, 6)
        assert report.complete and report.clean
        assert out.language.accepts(make_word("a", "b"))
        assert not out.language.accepts(make_word("b", "a"))

    def test_accepted_words_have_admissible_types(self):
        g = VertexGraph.make(("u", "v", "w"), [("u", "v")])
        out = graph_product(g, {"u": c2_demo("a"), "v": c2_demo("b"), "w": z_demo("c")})
        adm = admissible_automaton(g)
        for word in out.language.enumerate_words(5):
            pruned, types = out.oracle.prune(out.oracle_word(word))
            assert adm.accepts(tuple(Letter(t) for t in types))
            decomp = out.oracle.decompose(out.oracle_word(word))
            for (vertex, sub) in decomp.parts:
                assert not out.oracle.vertex_oracles[vertex].is_identity(sub)

    def test_local_accepting_epsilon_rejected(self):
        g = VertexGraph.make(("u",), [])
        letter = Letter("g")
        bad_lang = finite_language([EPSILON, (letter,)])
        bad = Demonstration(z_demo("a").oracle, {letter: make_word("a")}, bad_lang)
        with pytest.raises(ValueError, match="empty word"):
            graph_product(g, {"u": bad})

    def test_language_letter_clash_rejected(self):
        g = VertexGraph.make(("u", "v"), [])
        with pytest.raises(ValueError):
            graph_product(g, {"u": c2_demo("a"), "v": c2_demo("a")})


# -- padded triples ------------------------------------------------------


class TestPaddedTriples:
    def test_letterwise_padding_example(self):
        u = make_word("h", "i")
        v = make_word("b", "y", "e")
        w = make_word("h", "e", "l", "l", "o")
        padded = pad_triple_word(u, v, w)
        assert [x.name for x in padded] == [
            "(h|b|h)", "(i|y|e)", "(#pad|e|l)", "(#pad|#pad|l)", "(#pad|#pad|o)"]

    def test_split_round_trip(self):
        t = make_triple("a", "#pad", "a^-1")
        assert split_triple(t) == ("a", "#pad", "a^-1")

    def test_all_pad_rejected(self):
        with pytest.raises(ValueError):
            make_triple("#pad", "#pad", "#pad")

    def test_projection_single_word(self):
        a, b = Letter("a"), Letter("b")
        padded = pad_triple_word((a,), EPSILON, (b, b))
        t = SyncTripleAutomaton(single_word(padded), (a, b))
        out = autostackable_projection(t)
        assert out.enumerate_words(3) == [(a,)]

    def test_projection_rejects_resumed_padding(self):
        a = Letter("a")
        bad_word = (make_triple("a", "#pad", "a"), make_triple("a", "a", "a"))
        t = SyncTripleAutomaton(single_word(bad_word), (a,))
        with pytest.raises(ValueError, match="padding"):
            autostackable_projection(t)

    def test_unknown_component_rejected(self):
        a = Letter("a")
        word = (make_triple("a", "z", "a"),)
        with pytest.raises(ValueError, match="base letter"):
            SyncTripleAutomaton(single_word(word), (a,))


def z_rewriting_fixture():
    """Padded triples (y, x, x) for normal forms y and generators x of Z.

    Rows encode a rewriting system whose normal forms are the empty word
    and sign-consistent powers; all rewriting arrows are degenerate, so
    the third coordinate equals the second.
    """
    a, ainv = Letter("a"), Letter("a^-1")
    letters = {}
    for x in (a, ainv):
        letters[("start0", x)] = make_triple("#pad", x.name, x.name)
        for head in (a, ainv):
            letters[("start", head, x)] = make_triple(head.name, x.name, x.name)
    tail = {head: make_triple(head.name, "#pad", "#pad") for head in (a, ainv)}

    states = {"i", "done"} | {("run", h.name) for h in (a, ainv)}
    transitions = set()
    for x in (a, ainv):
        transitions.add(("i", letters[("start0", x)], "done"))
        for head in (a, ainv):
            transitions.add(("i", letters[("start", head, x)], ("run", head.name)))
    for head in (a, ainv):
        transitions.add((("run", head.name), tail[head], ("run", head.name)))
    alphabet = tuple(dict.fromkeys(list(letters.values()) + list(tail.values())))
    accepting = frozenset({"done"} | {("run", h.name) for h in (a, ainv)})
    nfa = Nfa(alphabet, frozenset(states), frozenset(transitions),
              frozenset({"i"}), accepting)
    return SyncTripleAutomaton(nfa, (a, ainv))


class TestCrossSection:
    def test_projection_of_rewriting_fixture_is_normal_forms(self):
        t = z_rewriting_fixture()
        out = autostackable_projection(t)
        expected = {EPSILON}
        a, ainv = Letter("a"), Letter("a^-1")
        for n in range(1, 7):
            expected.add((a,) * n)
            expected.add((ainv,) * n)
        assert set(out.enumerate_words(6)) == expected

    def test_cross_section_recovers_demo(self):
        t = z_rewriting_fixture()
        section = autostackable_projection(t)
        demo = cross_section_to_demo(section, z_demo().oracle)
        reference = z_demo()
        assert set(demo.language.enumerate_words(6)) == \
            set(reference.language.enumerate_words(6))
        assert demo.verify_no_identity(6) == []
        assert demo.verify_coverage(6, 6).complete

    def test_rep_must_be_accepted(self):
        with pytest.raises(ValueError, match="not in the language"):
            cross_section_to_demo(z_demo().language, z_demo().oracle)

    def test_rep_must_be_identity(self):
        lang = finite_language([EPSILON, (Letter("a"),)])
        with pytest.raises(ValueError, match="evaluates elsewhere"):
            cross_section_to_demo(lang, z_demo().oracle, (Letter("a"),))
