import pathlib

import pytest

from epicdemo.automata import Letter, make_word
from epicdemo.constructions import CosetTable, fi_subgroup, graph_product
from epicdemo.demonstrations import z_demo
from epicdemo.errors import LoadError
from epicdemo.graphproduct import VertexGraph
from epicdemo.groups import FreeGroupOracle, IntegerMatrixOracle, PermutationOracle
from epicdemo.workspace import (
    Workspace,
    canonical_states,
    load,
    load_text,
    render,
    render_automaton,
)

from test_groups import heisenberg_oracle

DATA = pathlib.Path(__file__).resolve().parent.parent / "data" / "demo_workspace.epic"


def load_str(text):
    return load_text([(None, text)])


class TestSampleFile:
    def test_counts(self):
        ws = load([DATA])
        assert set(ws.groups) == {"Z", "S3"}
        assert set(ws.automata) == {"powers"}
        assert set(ws.demonstrations) == {"Zdemo"}
        assert set(ws.cosettables) == {"evens"}
        assert set(ws.presentations) == {"plane"}

    def test_parsed_demo_equals_builtin(self):
        ws = load([DATA])
        demo = ws.demonstrations["Zdemo"]
        reference = z_demo()
        assert set(demo.language.enumerate_words(6)) == \
            set(reference.language.enumerate_words(6))
        assert demo.verify_no_identity(8) == []

    def test_coset_table_builds_even_demo(self):
        ws = load([DATA])
        out = fi_subgroup(ws.demonstrations["Zdemo"], ws.cosettables["evens"])
        report = out.verify_coverage(4, 4)
        assert {int(k.data.decode()) for k in report.covered} == {-4, -2, 2, 4}

    def test_round_trip_is_stable(self):
        ws = load([DATA])
        text = render(ws)
        again = load_str(text)
        assert render(again) == text
        assert set(again.groups) == set(ws.groups)
        assert again.groups["S3"] == ws.groups["S3"]
        assert again.presentations["plane"] == ws.presentations["plane"]
        assert set(again.demonstrations["Zdemo"].language.enumerate_words(5)) == \
            set(ws.demonstrations["Zdemo"].language.enumerate_words(5))


class TestComments:
    def test_inline_hash_drops_tail(self):
        ws = load_str(
            "automaton a\n"
            "  alphabet x # the only letter\n"
            "  states q0 q1\n"
            "  initial q0\n"
            "  accept q1\n"
            "  trans q0 x q1 # sole edge\n"
            "end\n")
        assert ws.automata["a"].accepts(make_word("x"))

    def test_pad_letter_survives(self):
        ws = load_str(
            "automaton a\n"
            "  alphabet (x|#pad|y) #pad\n"
            "  states q0 q1\n"
            "  initial q0\n"
            "  accept q1\n"
            "  trans q0 (x|#pad|y) q1\n"
            "end\n")
        assert Letter("#pad") in ws.automata["a"].alphabet
        text = render(ws)
        assert load_str(text).automata["a"].alphabet == ws.automata["a"].alphabet


class TestAutomatonBlocks:
    def test_eps_transition(self):
        ws = load_str(
            "automaton a\n"
            "  alphabet x\n"
            "  states q0 q1\n"
            "  initial q0\n"
            "  accept q1\n"
            "  trans q0 eps q1\n"
            "end\n")
        assert ws.automata["a"].accepts(())

    def test_eps_letter_rejected(self):
        with pytest.raises(LoadError, match="reserved"):
            load_str("automaton a\n  alphabet eps\n  states q\n  initial q\n"
                     "  accept q\nend\n")

    def test_undeclared_state_rejected(self):
        with pytest.raises(LoadError, match="undeclared state"):
            load_str("automaton a\n  alphabet x\n  states q0\n  initial q0\n"
                     "  accept q0\n  trans q0 x q9\nend\n")

    def test_unknown_label_rejected(self):
        with pytest.raises(LoadError, match="not in the alphabet"):
            load_str("automaton a\n  alphabet x\n  states q0\n  initial q0\n"
                     "  accept q0\n  trans q0 y q0\nend\n")

    def test_unterminated_block(self):
        with pytest.raises(LoadError, match="unterminated"):
            load_str("automaton a\n  alphabet x\n")

    def test_line_numbers_in_errors(self):
        try:
            load_str("automaton a\n  alphabet x\n  states q0\n  initial q0\n"
                     "  accept q0\n  trans q0 y q0\nend\n")
        except LoadError as e:
            assert e.line == 6
        else:
            pytest.fail("expected a LoadError")


class TestGroupBlocks:
    def test_perm_multi_cycle(self):
        ws = load_str("group g perm degree 4\n  gen x = (1 2)(3 4)\nend\n")
        oracle = ws.groups["g"]
        assert oracle.gens[Letter("x")] == (1, 0, 3, 2)

    def test_identity_generator_renders_and_reloads(self):
        oracle = PermutationOracle(3, {Letter("e"): (0, 1, 2)})
        ws = Workspace(groups={"g": oracle})
        text = render(ws)
        assert "gen e = ()" in text
        assert load_str(text).groups["g"] == oracle

    def test_matrix_round_trip(self):
        ws = Workspace(groups={"heis": heisenberg_oracle()})
        text = render(ws)
        assert load_str(text).groups["heis"] == heisenberg_oracle()

    def test_free_round_trip(self):
        oracle = FreeGroupOracle(2, ("u", "v"))
        text = render(Workspace(groups={"f": oracle}))
        again = load_str(text).groups["f"]
        assert again.names == ("u", "v")
        assert again == oracle

    def test_bad_flavor_rejected(self):
        with pytest.raises(LoadError, match="flavor"):
            load_str("group g nilpotent\nend\n")

    def test_matrix_determinant_error_carries_line(self):
        with pytest.raises(LoadError, match="determinant"):
            load_str("group g matrix dim 2\n  gen x = [[2,0],[0,1]]\nend\n")


GP_TEXT = (
    "group prod graphproduct\n"
    "  vertices u v\n"
    "  edge u v\n"
    "  vertex u uses left\n"
    "  vertex v uses right\n"
    "end\n"
    "group left zk rank 1\n"
    "  gen a = [1]\n"
    "  gen a^-1 = [-1]\n"
    "end\n"
    "group right zk rank 1\n"
    "  gen b = [1]\n"
    "  gen b^-1 = [-1]\n"
    "end\n")


class TestGraphProductBlocks:
    def test_forward_references_link(self):
        ws = load_str(GP_TEXT)
        oracle = ws.groups["prod"]
        assert oracle.graph.adjacent("u", "v")
        assert not oracle.is_identity(make_word("a", "b"))
        assert oracle.is_identity(make_word("a", "b", "a^-1", "b^-1"))

    def test_render_orders_dependencies_first(self):
        ws = load_str(GP_TEXT)
        text = render(ws)
        assert text.index("group left") < text.index("group prod")
        assert render(load_str(text)) == text

    def test_alphabet_collision_rejected(self):
        text = GP_TEXT.replace("uses right", "uses left")
        with pytest.raises(LoadError, match="two vertex alphabets"):
            load_str(text)

    def test_circular_reference_rejected(self):
        text = (
            "group g1 graphproduct\n  vertices u\n  vertex u uses g2\nend\n"
            "group g2 graphproduct\n  vertices v\n  vertex v uses g1\nend\n")
        with pytest.raises(LoadError, match="circular"):
            load_str(text)

    def test_undefined_vertex_group_rejected(self):
        text = ("group g graphproduct\n  vertices u\n  vertex u uses ghost\nend\n")
        with pytest.raises(LoadError, match="ghost"):
            load_str(text)


class TestReferences:
    def test_undefined_group_in_demo(self):
        with pytest.raises(LoadError, match="undefined group 'ghost'"):
            load_str("automaton a\n  alphabet x\n  states q0 q1\n  initial q0\n"
                     "  accept q1\n  trans q0 x q1\nend\n"
                     "demonstration d\n  group ghost\n  automaton a\nend\n")

    def test_undefined_automaton_in_demo(self):
        with pytest.raises(LoadError, match="undefined automaton"):
            load_str("group g zk rank 1\n  gen x = [1]\nend\n"
                     "demonstration d\n  group g\n  automaton ghost\nend\n")

    def test_duplicate_name_rejected(self):
        with pytest.raises(LoadError, match="duplicate group name"):
            load_str("group g zk rank 1\n  gen x = [1]\nend\n"
                     "group g zk rank 1\n  gen y = [1]\nend\n")

    def test_eval_letter_mismatch_reported(self):
        with pytest.raises(LoadError):
            load_str("group g zk rank 1\n  gen x = [1]\nend\n"
                     "automaton a\n  alphabet x\n  states q0 q1\n  initial q0\n"
                     "  accept q1\n  trans q0 x q1\nend\n"
                     "demonstration d\n  group g\n  letter y = x\n  automaton a\nend\n")

    def test_default_eval_map_is_identity(self):
        ws = load_str("group g zk rank 1\n  gen x = [1]\nend\n"
                      "automaton a\n  alphabet x\n  states q0 q1\n  initial q0\n"
                      "  accept q1\n  trans q0 x q1\nend\n"
                      "demonstration d\n  group g\n  automaton a\nend\n")
        demo = ws.demonstrations["d"]
        assert demo.eval_map[Letter("x")] == (Letter("x"),)


class TestCosetTableBlocks:
    def test_count_mismatch(self):
        with pytest.raises(LoadError, match="promises 3 cosets"):
            load_str("group g zk rank 1\n  gen a = [1]\nend\n"
                     "cosettable t group g subgroupof 3\n"
                     "  coset H rep eps\n  coset C rep a\n"
                     "  action H a C\n  action C a H\nend\n")

    def test_unknown_coset_in_action(self):
        with pytest.raises(LoadError, match="unknown coset"):
            load_str("group g zk rank 1\n  gen a = [1]\nend\n"
                     "cosettable t group g subgroupof 1\n"
                     "  coset H rep eps\n  action H a X\nend\n")


class TestPresentationBlocks:
    def test_relators_stored_reduced(self):
        ws = load_str("presentation p\n  alphabet a\n  relator a a a^-1\nend\n")
        assert ws.presentations["p"].relators == (make_word("a"),)
        assert "relator a\n" in render(ws)


class TestCanonicalStates:
    def test_tuple_states_render_and_reload(self):
        g = VertexGraph.make(("u", "v"), [("u", "v")])
        from test_groups import c2_oracle
        from epicdemo.demonstrations import finite_demo
        demo = graph_product(g, {"u": finite_demo(c2_oracle("a")),
                                 "v": finite_demo(c2_oracle("b"))})
        text = render_automaton("glued", demo.language)
        ws = load_str(text)
        assert set(ws.automata["glued"].enumerate_words(4)) == \
            set(demo.language.enumerate_words(4))

    def test_second_render_is_fixpoint(self):
        demo = z_demo()
        gp = graph_product(VertexGraph.make(("u", "v"), []),
                           {"u": z_demo("a"), "v": z_demo("b")})
        for nfa in (demo.language, gp.language):
            text1 = render_automaton("m", nfa)
            text2 = render_automaton("m", load_str(text1).automata["m"])
            assert text2 == text1

    def test_names_follow_discovery_order(self):
        names = canonical_states(z_demo().language)
        assert sorted(names.values()) == ["s0", "s1", "s2"]
        assert names["s"] == "s0"  # the lone initial state
