import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpgqa.completion import MockCompletionClient
from cpgqa.enrichment import (
    CONTEXT_ABSENT,
    ZERO_SHOT_INSTRUCTION,
    Exemplar,
    PredictionFailure,
    apply_classification,
    build_few_shot_prompt,
    build_zero_shot_prompt,
    classify_nodes,
    heuristic_categorize,
    label_all_relations,
    label_relation,
    load_exemplars,
    load_gold_labels,
    load_lexicons,
    parse_category_reply,
    score_classification,
    truncate_percent,
)
from cpgqa.errors import (
    EmptyExemplarList,
    MissingGoldLabel,
    UnlabeledEndpoint,
    UnparseableLabel,
)
from cpgqa.graph import GuidelineNode, NodeCategory, RelationType, load_graph

from conftest import GOLDEN, make_graph, read_fixture

DC = NodeCategory.DISEASE_CONDITION
TO = NodeCategory.TREATMENT_OPTION
EV = NodeCategory.EVALUATION


class TestRelationRule:
    def test_requires_pair(self):
        assert label_relation(DC, TO) is RelationType.REQUIRES

    def test_indicates_pair(self):
        assert label_relation(EV, DC) is RelationType.INDICATES

    def test_default_pair(self):
        assert label_relation(EV, EV) is RelationType.IS_FOLLOWED_BY

    def test_totality_and_multiplicities(self):
        tally = {r: 0 for r in RelationType}
        for src, dst in itertools.product(NodeCategory, repeat=2):
            tally[label_relation(src, dst)] += 1
        assert tally[RelationType.REQUIRES] == 1
        assert tally[RelationType.INDICATES] == 1
        assert tally[RelationType.IS_FOLLOWED_BY] == 7

    def test_unlabeled_endpoint(self):
        with pytest.raises(UnlabeledEndpoint):
            label_relation(None, TO)


class TestLabelAllRelations:
    def test_three_node_chain(self):
        graph = make_graph(
            [("a", DC), ("b", TO), ("c", EV)],
            [("a", "b", None), ("b", "c", None)],
        )
        labeled = label_all_relations(graph)
        relations = [e.relation for e in labeled.edges]
        assert relations == [RelationType.REQUIRES, RelationType.IS_FOLLOWED_BY]

    def test_reports_uncategorized_node_ids(self):
        graph = make_graph([("a", DC), ("b", None)], [("a", "b", None)])
        with pytest.raises(UnlabeledEndpoint) as excinfo:
            label_all_relations(graph)
        assert excinfo.value.node_ids == ["b"]

    def test_nodes_unchanged(self):
        graph = make_graph([("a", DC), ("b", TO)], [("a", "b", None)])
        assert label_all_relations(graph).nodes == graph.nodes

    def test_fixture_counts_match_per_edge_rule(self, fixture_graph, fixture_document):
        # independent re-application of the rule over the raw document
        categories = {n["id"]: n["category"] for n in fixture_document["nodes"]}

        def rule(src, dst):
            if src == "DiseaseCondition" and dst == "TreatmentOption":
                return "requires"
            if src == "Evaluation" and dst == "DiseaseCondition":
                return "indicates"
            return "isFollowedBy"

        expected = {"requires": 0, "indicates": 0, "isFollowedBy": 0}
        for edge in fixture_document["edges"]:
            expected[rule(categories[edge["source"]], categories[edge["target"]])] += 1
        relabeled = label_all_relations(fixture_graph)
        got = {r.value: 0 for r in RelationType}
        for edge in relabeled.edges:
            got[edge.relation.value] += 1
        assert got == expected
        # the shipped fixture already carries rule-consistent relations
        assert relabeled == fixture_graph


class TestHeuristic:
    @pytest.mark.parametrize(
        "content,expected",
        [
            ("Concurrent chemoradiation", TO),
            ("Biomarker testing", EV),
            ("N3 positive", DC),
            ("Consider RT", TO),
            ("PFTs, FDG-PET/CT scan, Brain MRI with contrast", EV),
            ("Progression", DC),
        ],
    )
    def test_lexicon_vote(self, content, expected):
        assert heuristic_categorize(GuidelineNode(id="x", content=content)) is expected

    def test_whole_word_matching(self):
        # "resectable" must not fire the "resection" keyword
        assert heuristic_categorize(GuidelineNode(id="x", content="Resectable")) is DC

    def test_context_breaks_ties(self):
        node = GuidelineNode(id="x", content="Next step", context="surgery planning")
        assert heuristic_categorize(node) is TO

    def test_lexicon_file(self):
        lexicons = load_lexicons(json.dumps({"treatment": ["ablation"], "evaluation": ["panel"]}))
        node = GuidelineNode(id="x", content="Cryoablation or ablation")
        assert heuristic_categorize(node, lexicons) is TO

    def test_fixture_lexicon_file_loads(self):
        lexicons = load_lexicons(read_fixture("lexicon.json"))
        assert "therapy" in lexicons["treatment"]


class TestPrompts:
    def test_zero_shot_with_context_golden(self):
        node = GuidelineNode(id="x1", content="Operable", context="clinical stage")
        expected = (GOLDEN / "zero_shot_with_context.txt").read_text(encoding="utf-8")
        assert build_zero_shot_prompt(node) == expected

    def test_zero_shot_no_context_golden(self):
        node = GuidelineNode(id="x2", content="Tumor response evaluation")
        expected = (GOLDEN / "zero_shot_no_context.txt").read_text(encoding="utf-8")
        prompt = build_zero_shot_prompt(node)
        assert prompt == expected
        assert CONTEXT_ABSENT in prompt

    def test_zero_shot_deterministic(self):
        node = GuidelineNode(id="x", content="Operable", context="clinical stage")
        assert build_zero_shot_prompt(node) == build_zero_shot_prompt(node)

    def test_few_shot_golden(self):
        node = GuidelineNode(id="x1", content="Operable", context="clinical stage")
        exemplars = [
            Exemplar(content="Concurrent chemoradiation", context="Initial treatment", label=TO),
            Exemplar(content="N3 positive", context=None, label=DC),
        ]
        expected = (GOLDEN / "few_shot.txt").read_text(encoding="utf-8")
        assert build_few_shot_prompt(node, exemplars) == expected

    def test_few_shot_rejects_empty_exemplars(self):
        with pytest.raises(EmptyExemplarList):
            build_few_shot_prompt(GuidelineNode(id="x", content="Operable"), [])

    def test_few_shot_contains_instruction(self):
        node = GuidelineNode(id="x", content="Operable")
        exemplars = [Exemplar(content="Scan", context=None, label=EV)]
        assert ZERO_SHOT_INSTRUCTION in build_few_shot_prompt(node, exemplars)

    def test_single_exemplar_single_block(self):
        node = GuidelineNode(id="x", content="Operable")
        exemplars = [Exemplar(content="Scan", context=None, label=EV)]
        prompt = build_few_shot_prompt(node, exemplars)
        assert prompt.count("label:") == 1

    def test_twenty_three_exemplars_order_preserved(self):
        exemplars = load_exemplars(read_fixture("exemplars.json"))
        assert len(exemplars) == 23
        prompt = build_few_shot_prompt(GuidelineNode(id="x", content="Operable"), exemplars)
        assert prompt.count("label:") == 23
        positions = [prompt.index(e.content) for e in exemplars]
        assert positions == sorted(positions)

    def test_exemplar_absent_context_uses_absence_line(self):
        exemplars = [Exemplar(content="Scan", context=None, label=EV)]
        prompt = build_few_shot_prompt(GuidelineNode(id="x", content="Operable"), exemplars)
        assert f"node text: Scan\ncontext: {CONTEXT_ABSENT}" in prompt


class TestParseReply:
    def test_exact_label(self):
        assert parse_category_reply("Disease Condition") is DC

    def test_case_and_punctuation(self):
        assert parse_category_reply("Label: treatment option.") is TO

    def test_earliest_occurrence_wins(self):
        assert parse_category_reply("Evaluation of Disease Condition") is EV

    @pytest.mark.parametrize("category", list(NodeCategory))
    @pytest.mark.parametrize("casing", [str.lower, str.upper, str.title])
    def test_round_trip_any_casing(self, category, casing):
        assert parse_category_reply(casing(category.display_name)) is category

    def test_unparseable(self):
        with pytest.raises(UnparseableLabel):
            parse_category_reply("banana")


class TestClassifyNodes:
    def test_heuristic_needs_no_client(self, fixture_graph):
        result = classify_nodes(fixture_graph, mode="heuristic")
        assert set(result.predictions) == {n.id for n in fixture_graph.nodes}

    def test_heuristic_matches_independent_rerun(self, fixture_graph, fixture_document):
        import re

        treatment = ["therapy", "chemoradiation", "resection", "RT", "surgery", "treatment"]
        evaluation = ["scan", "MRI", "biopsy", "testing", "evaluation", "PET", "PFTs"]

        def hits(text, words):
            return sum(len(re.findall(rf"\b{re.escape(w)}\b", text, re.I)) for w in words)

        def rerun(node):
            t, e = hits(node["content"], treatment), hits(node["content"], evaluation)
            if t == e and node["context"]:
                t, e = hits(node["context"], treatment), hits(node["context"], evaluation)
            if t > e:
                return "TreatmentOption"
            if e > t:
                return "Evaluation"
            return "DiseaseCondition"

        result = classify_nodes(fixture_graph, mode="heuristic")
        for raw in fixture_document["nodes"]:
            assert result.predictions[raw["id"]].value == rerun(raw)

    def test_oracle_mock_is_all_correct(self, fixture_graph):
        gold = {n.id: n.category for n in fixture_graph.nodes}
        script = {
            build_zero_shot_prompt(n): gold[n.id].display_name for n in fixture_graph.nodes
        }
        client = MockCompletionClient.scripted(script)
        result = classify_nodes(fixture_graph, client, "zero-shot")
        report = score_classification(result, gold)
        assert report.correct == report.total == 38
        assert report.accuracy == "100.00"
        for row in NodeCategory:
            for col in NodeCategory:
                if row is not col:
                    assert report.confusion[row.value][col.value] == 0

    def test_single_unparseable_reply_is_isolated(self, fixture_graph):
        gold = {n.id: n.category for n in fixture_graph.nodes}
        script = {}
        for node in fixture_graph.nodes:
            reply = "banana" if node.id == "n05" else gold[node.id].display_name
            script[build_zero_shot_prompt(node)] = reply
        result = classify_nodes(fixture_graph, MockCompletionClient.scripted(script), "zero-shot")
        assert result.predictions["n05"] == PredictionFailure(reason="unparseable-label")
        assert result.predictions["n04"] is gold["n04"]
        report = score_classification(result, gold)
        assert report.correct == 37
        assert report.confusion["failure"][gold["n05"].value] == 1

    def test_client_failure_recorded_not_fatal(self, fixture_graph):
        client = MockCompletionClient()  # empty script: every call fails
        result = classify_nodes(fixture_graph, client, "zero-shot")
        assert all(isinstance(p, PredictionFailure) for p in result.predictions.values())
        assert all(p.reason == "client-malformed-response" for p in result.predictions.values())

    def test_few_shot_requires_exemplars(self, fixture_graph):
        with pytest.raises(EmptyExemplarList):
            classify_nodes(fixture_graph, MockCompletionClient(), "few-shot")

    def test_parallel_equals_sequential(self, fixture_graph):
        sequential = classify_nodes(fixture_graph, mode="heuristic")
        parallel = classify_nodes(fixture_graph, mode="heuristic", parallelism=4)
        assert sequential == parallel

    def test_apply_classification(self):
        graph = make_graph([("a", None), ("b", None)], [])
        result = classify_nodes(graph, mode="heuristic")
        enriched = apply_classification(graph, result)
        assert all(n.category is not None for n in enriched.nodes)
        assert all(n.category is None for n in graph.nodes)  # original untouched


class TestScoring:
    def test_nine_of_ten(self):
        graph = make_graph([(f"n{i}", DC, "N3 positive") for i in range(10)], [])
        result = classify_nodes(graph, mode="heuristic")
        gold = {f"n{i}": DC for i in range(9)}
        gold["n9"] = TO
        assert score_classification(result, gold).accuracy == "90.00"

    def test_zero_of_n(self):
        graph = make_graph([(f"n{i}", DC, "N3 positive") for i in range(7)], [])
        result = classify_nodes(graph, mode="heuristic")
        gold = {f"n{i}": EV for i in range(7)}
        assert score_classification(result, gold).accuracy == "0.00"

    def test_missing_gold_label(self):
        graph = make_graph([("a", DC, "x")], [])
        result = classify_nodes(graph, mode="heuristic")
        with pytest.raises(MissingGoldLabel):
            score_classification(result, {})

    def test_fixture_gold_file(self, fixture_graph):
        gold = load_gold_labels(read_fixture("gold-labels.json"))
        assert gold == {n.id: n.category for n in fixture_graph.nodes}

    @given(st.permutations(list(range(10))))
    @settings(max_examples=25, deadline=None)
    def test_accuracy_invariant_under_id_permutation(self, order):
        nodes = [(f"n{i}", DC, "N3 positive") for i in range(10)]
        graph = make_graph(nodes, [])
        gold_values = [DC] * 6 + [TO] * 4
        gold_a = {f"n{i}": gold_values[i] for i in range(10)}
        gold_b = {f"n{i}": gold_values[order[i]] for i in range(10)}
        result = classify_nodes(graph, mode="heuristic")
        assert (
            score_classification(result, gold_a).accuracy
            == score_classification(result, gold_b).accuracy
        )


class TestTruncatedPercent:
    @pytest.mark.parametrize(
        "count,total,expected",
        [(1, 23, "4.34"), (2, 23, "8.69"), (4, 59, "6.77"), (39, 59, "66.10"),
         (9, 10, "90.00"), (0, 7, "0.00"), (0, 0, "0.00"), (23, 23, "100.00")],
    )
    def test_spot_values(self, count, total, expected):
        assert truncate_percent(count, total) == expected
