import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpgqa.completion import MockCompletionClient
from cpgqa.cql import EngineLimits, evaluate, parse_query
from cpgqa.errors import ClientFailure, MalformedDocument
from cpgqa.graph import NodeCategory
from cpgqa.pipeline import (
    ErrorType,
    EvalReport,
    QaQuestion,
    ask,
    build_query_prompt,
    classify_error,
    default_schema_summary,
    generate_query,
    load_questions,
    run_eval,
    strip_code_fences,
    train_exemplars,
)
from cpgqa.render import normalize_answer_text

from conftest import GOLDEN, random_labeled_graph, read_fixture, read_query

TYPE_II_QUERY = (
    'MATCH (n:Disease_Condition)\nWHERE toLower(n.content) CONTAINS "resectable superior sulcus"\n'
    "WITH n\nMATCH path=(n)-[*1..5]->(t:Treatment_Option)\nRETURN path, nodes(path)"
)
TYPE_III_QUERY = (
    'MATCH path=(n:Disease_Condition)-[*1..4]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "solitary adrenal metastasis"\n'
    'AND toLower(t.content) CONTAINS "adrenalectomy"\nRETURN path, nodes(path)'
)


@pytest.fixture(scope="module")
def dataset():
    return load_questions(read_fixture("qa-dataset.json"))


@pytest.fixture(scope="module")
def exemplars(dataset):
    return train_exemplars(dataset)


def scripted_for(questions, exemplars, replies_by_id):
    script = {}
    schema = default_schema_summary()
    for question in questions:
        if question.id in replies_by_id:
            prompt = build_query_prompt(schema, exemplars, question.text)
            script[prompt] = replies_by_id[question.id]
    return MockCompletionClient.scripted(script)


class TestDataset:
    def test_shape(self, dataset):
        by_set = {"A": [], "B": []}
        for question in dataset:
            by_set[question.qset].append(question)
        assert len(by_set["A"]) == 26
        assert len(by_set["B"]) == 46
        assert sum(1 for q in by_set["A"] if q.split == "train") == 3
        assert sum(1 for q in by_set["B"] if q.split == "train") == 10

    def test_train_requires_gold_query(self):
        with pytest.raises(MalformedDocument):
            QaQuestion(id="x", text="t", qset="A", split="train", gold_query=None)

    def test_gold_queries_parse(self, dataset):
        for question in dataset:
            if question.split == "train":
                parse_query(question.gold_query)


class TestPromptBuilding:
    def test_thirteen_exemplar_pairs(self, exemplars):
        prompt = build_query_prompt(default_schema_summary(), exemplars, "Q?")
        assert len(exemplars) == 13
        assert prompt.count("Question: ") == 14  # 13 pairs + the target
        assert prompt.count("Query:") == 14

    def test_single_pair_and_schema(self):
        prompt = build_query_prompt("SCHEMA-HERE", [("q1", "c1")], "Q?")
        assert "SCHEMA-HERE" in prompt
        assert prompt.count("Question: ") == 2

    def test_deterministic(self, exemplars):
        a = build_query_prompt(default_schema_summary(), exemplars, "Q?")
        b = build_query_prompt(default_schema_summary(), exemplars, "Q?")
        assert a == b

    def test_golden(self):
        pairs = [
            ("Which treatment follows operable disease?",
             'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
             'WHERE toLower(n.content) CONTAINS "operable"\nRETURN path, nodes(path)'),
            ("What happens after biomarker testing?",
             'MATCH path=(n:Evaluation)-[*1..5]->(t:Treatment_Option)\n'
             'WHERE toLower(n.content) CONTAINS "biomarker testing"\nRETURN path, nodes(path)'),
        ]
        prompt = build_query_prompt(
            default_schema_summary(), pairs, "What is the treatment pathway for Stage II disease?"
        )
        assert prompt == (GOLDEN / "query_prompt.txt").read_text(encoding="utf-8")

    def test_empty_exemplars_rejected(self):
        with pytest.raises(MalformedDocument):
            build_query_prompt("s", [], "q")


class TestGenerateQuery:
    def test_returns_exact_mock_reply(self, exemplars):
        expected = read_query("set_a_generated.cql").rstrip("\n")
        client = MockCompletionClient(sequence=[expected])
        got = generate_query("any question", client, exemplars=exemplars)
        assert got == expected

    def test_strips_code_fences(self, exemplars):
        client = MockCompletionClient(sequence=["```cypher\nMATCH (n) RETURN n\n```"])
        assert generate_query("q", client, exemplars=exemplars) == "MATCH (n) RETURN n"

    def test_fence_variants(self):
        assert strip_code_fences("```\nX\n```") == "X"
        assert strip_code_fences("  X  ") == "X"
        assert strip_code_fences("no fences") == "no fences"

    def test_client_failure_raised(self, exemplars):
        with pytest.raises(ClientFailure):
            generate_query("q", MockCompletionClient(), exemplars=exemplars)


class TestClassifyError:
    def test_type_i(self, fixture_graph):
        assert classify_error("MATCH (n RETURN n", fixture_graph) is ErrorType.TYPE_I

    def test_type_ii_split_nodes(self, fixture_graph):
        # fixture stores "Resectable" and "Superior sulcus" as separate nodes
        contents = {n.content.lower() for n in fixture_graph.nodes}
        assert not any("resectable superior sulcus" in c for c in contents)
        assert classify_error(TYPE_II_QUERY, fixture_graph) is ErrorType.TYPE_II

    def test_type_iii_bounds(self, fixture_graph):
        assert classify_error(TYPE_III_QUERY, fixture_graph) is ErrorType.TYPE_III
        widened = TYPE_III_QUERY.replace("*1..4", "*1..7")
        assert classify_error(widened, fixture_graph) is ErrorType.NO_ERROR

    def test_no_error(self, fixture_graph):
        query = read_query("set_b_generated.cql")
        assert classify_error(query, fixture_graph) is ErrorType.NO_ERROR

    def test_priority_syntax_beats_content(self, fixture_graph):
        # unparseable AND mentions an unmatched literal: syntax wins
        text = 'MATCH (n WHERE n.content CONTAINS "resectable superior sulcus" RETURN n'
        assert classify_error(text, fixture_graph) is ErrorType.TYPE_I

    def test_priority_content_beats_bounds(self, fixture_graph):
        text = (
            'MATCH path=(n:Disease_Condition)-[*1..4]->(t:Treatment_Option)\n'
            'WHERE toLower(n.content) CONTAINS "no such content anywhere"\n'
            'AND toLower(t.content) CONTAINS "adrenalectomy"\nRETURN path'
        )
        assert classify_error(text, fixture_graph) is ErrorType.TYPE_II

    def test_empty_even_at_cap_is_no_error(self, fixture_graph):
        # needles both match, but no directed path exists in that direction
        text = (
            'MATCH path=(t:Treatment_Option)-[*1..2]->(n:Disease_Condition)\n'
            'WHERE toLower(t.content) CONTAINS "adrenalectomy"\n'
            'AND toLower(n.content) CONTAINS "solitary adrenal metastasis"\nRETURN path'
        )
        assert classify_error(text, fixture_graph) is ErrorType.NO_ERROR

    def test_type_ii_soundness_of_clean_queries(self, fixture_graph):
        # any query judged NoError/TypeIII has every needle somewhere in the corpus
        for name in ("set_a_handwritten.cql", "set_b_handwritten.cql", "set_b_generated.cql"):
            text = read_query(name)
            verdict = classify_error(text, fixture_graph)
            assert verdict in (ErrorType.NO_ERROR, ErrorType.TYPE_III)
            ast = parse_query(text)
            from cpgqa.cql import filter_matches
            from cpgqa.cql.ast import WhereClause

            for clause in ast.clauses:
                if isinstance(clause, WhereClause):
                    for flt in clause.filters:
                        assert any(filter_matches(n, flt) for n in fixture_graph.nodes)

    def test_bound_widening_monotone_on_random_graphs(self):
        rng = random.Random(99)
        for _ in range(60):
            graph = random_labeled_graph(rng, max_nodes=8, max_edges=16)
            lo = rng.randint(1, 2)
            hi = rng.randint(lo, 4)
            ast = parse_query(f"MATCH p=(a)-[*{lo}..{hi}]->(b) RETURN p")
            wide = parse_query(f"MATCH p=(a)-[*{lo}..{min(hi + 3, 10)}]->(b) RETURN p")
            narrow_rows = len(evaluate(ast, graph))
            wide_rows = len(evaluate(wide, graph))
            if narrow_rows:
                assert wide_rows >= narrow_rows


class TestAsk:
    def test_happy_path_matches_published_answer_opening(self, fixture_graph, dataset, exemplars):
        question = next(q for q in dataset if q.id == "qa04")
        client = scripted_for(
            dataset, exemplars, {"qa04": read_query("set_a_handwritten.cql").rstrip("\n")}
        )
        result = ask(question.text, fixture_graph, client, exemplars)
        assert result.error is None
        assert len(result.answers) >= 1
        first = normalize_answer_text(result.answers[0].text)
        assert first.startswith('If the current disease condition is "Stage IB, peripheral')
        assert '"Surgical exploration and resection' in first

    def test_gibberish_reply_is_type_i_with_no_answers(self, fixture_graph, exemplars):
        client = MockCompletionClient(sequence=["this is not a query"])
        result = ask("anything?", fixture_graph, client, exemplars)
        assert result.error is ErrorType.TYPE_I
        assert result.answers == []
        assert result.query == "this is not a query"

    def test_missing_needle_is_type_ii(self, fixture_graph, exemplars):
        # construct a needle guaranteed absent by scanning the corpus first
        needle = "zz-unmatched-literal"
        assert not any(needle in n.content.lower() for n in fixture_graph.nodes)
        reply = (
            f'MATCH path=(n)-[*1..3]->(t) WHERE toLower(n.content) CONTAINS "{needle}" '
            "RETURN path"
        )
        result = ask("q?", fixture_graph, MockCompletionClient(sequence=[reply]), exemplars)
        assert result.error is ErrorType.TYPE_II
        assert result.answers == []

    def test_client_failure_propagates(self, fixture_graph, exemplars):
        with pytest.raises(ClientFailure):
            ask("q?", fixture_graph, MockCompletionClient(), exemplars)

    def test_no_error_empty_results_yields_no_answers(self, fixture_graph, exemplars):
        reply = (
            'MATCH path=(t:Treatment_Option)-[*1..2]->(n:Disease_Condition)\n'
            'WHERE toLower(t.content) CONTAINS "adrenalectomy"\n'
            'AND toLower(n.content) CONTAINS "solitary adrenal metastasis"\nRETURN path'
        )
        result = ask("q?", fixture_graph, MockCompletionClient(sequence=[reply]), exemplars)
        assert result.error is None
        assert result.answers == []


class TestRunEval:
    def test_published_table_arithmetic(self, fixture_graph, dataset):
        from cpgqa.completion import replay_client

        report = run_eval(dataset, fixture_graph, replay_client("fixtures/transcript-eval.jsonl"))
        assert report.set_totals == {"A": 23, "B": 36}
        assert [report.percent("A", e) for e in ErrorType] == ["4.34", "13.04", "8.69", "73.91"]
        assert [report.percent("B", e) for e in ErrorType] == ["8.33", "22.22", "8.33", "61.11"]
        assert [report.overall_percent(e) for e in ErrorType] == ["6.77", "18.64", "8.47", "66.10"]

    def test_all_no_error(self, fixture_graph, dataset, exemplars):
        questions = [q for q in dataset if q.split == "train"] + [
            q for q in dataset if q.split == "test"
        ][:10]
        clean = 'MATCH path=(n:Disease_Condition)-[]->(t:Treatment_Option) RETURN path'
        replies = {q.id: clean for q in questions if q.split == "test"}
        client = scripted_for(questions, exemplars, replies)
        report = run_eval(questions, fixture_graph, client)
        total = sum(report.set_totals.values())
        assert total == 10
        assert report.overall_percent(ErrorType.NO_ERROR) == "100.00"
        assert report.overall_percent(ErrorType.TYPE_I) == "0.00"

    def test_client_failure_counts_as_type_i_with_note(self, fixture_graph, dataset, exemplars):
        questions = [q for q in dataset if q.split == "train"] + [
            next(q for q in dataset if q.split == "test")
        ]
        report = run_eval(questions, fixture_graph, MockCompletionClient())
        assert report.counts[questions[-1].qset][ErrorType.TYPE_I] == 1
        assert report.notes and "Type-I" in report.notes[0][1]

    def test_requires_test_questions(self, fixture_graph, dataset):
        train_only = [q for q in dataset if q.split == "train"]
        with pytest.raises(MalformedDocument):
            run_eval(train_only, fixture_graph, MockCompletionClient())

    def test_parallel_equals_sequential(self, fixture_graph, dataset):
        from cpgqa.completion import replay_client

        sequential = run_eval(dataset, fixture_graph, replay_client("fixtures/transcript-eval.jsonl"))
        parallel = run_eval(
            dataset, fixture_graph, replay_client("fixtures/transcript-eval.jsonl"), parallelism=4
        )
        assert sequential.counts == parallel.counts

    @given(
        st.lists(st.integers(min_value=0, max_value=40), min_size=4, max_size=4),
        st.lists(st.integers(min_value=0, max_value=40), min_size=4, max_size=4),
    )
    @settings(max_examples=60, deadline=None)
    def test_report_arithmetic_recomputes_from_raw_counts(self, counts_a, counts_b):
        if sum(counts_a) == 0 or sum(counts_b) == 0:
            return
        counts = {
            "A": dict(zip(ErrorType, counts_a)),
            "B": dict(zip(ErrorType, counts_b)),
        }
        totals = {"A": sum(counts_a), "B": sum(counts_b)}
        report = EvalReport(set_totals=totals, counts=counts)
        from cpgqa.enrichment import truncate_percent

        for name in ("A", "B"):
            assert sum(counts[name].values()) == totals[name]
            for error_type in ErrorType:
                assert report.percent(name, error_type) == truncate_percent(
                    counts[name][error_type], totals[name]
                )
        for error_type in ErrorType:
            assert report.overall_percent(error_type) == truncate_percent(
                counts["A"][error_type] + counts["B"][error_type],
                totals["A"] + totals["B"],
            )

    def test_table_shape(self, fixture_graph, dataset):
        from cpgqa.completion import replay_client

        report = run_eval(dataset, fixture_graph, replay_client("fixtures/transcript-eval.jsonl"))
        table = report.format_table()
        lines = table.splitlines()
        assert lines[0].startswith("Error Type")
        assert "#Occurrences in Query set A" in lines[0]
        assert "Overall Error (%)" in lines[0]
        assert lines[1].startswith("Type-I")
        assert "1 (4.34%)" in lines[1]
        assert lines[-1].startswith("Total")
        assert lines[-1].rstrip().endswith("-")
