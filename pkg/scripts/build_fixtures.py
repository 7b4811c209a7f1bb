#!/usr/bin/env python3
"""Regenerate everything under fixtures/.

The graph is a synthetic non-small-cell lung guideline excerpt shaped like
the real thing: a first-page staging hub branching into four pathway
strands (early stage, stage IIIB workup, superior sulcus, adrenal
metastasis) plus a surveillance loop. Edge relations are derived from the
endpoint categories, never hand-assigned.

Run from the repository root: python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import json
from pathlib import Path

from cpgqa.completion import prompt_sha256, save_transcript
from cpgqa.enrichment import label_all_relations
from cpgqa.graph import GuidelineGraph, GuidelineEdge, GuidelineNode, NodeCategory, export_graph
from cpgqa.pipeline import build_query_prompt, default_schema_summary, load_questions, train_exemplars

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

DC = NodeCategory.DISEASE_CONDITION
TO = NodeCategory.TREATMENT_OPTION
EV = NodeCategory.EVALUATION

# (id, category, content, context, page)
NODES = [
    # early-stage strand (n01..n06)
    ("n01", DC,
     "Stage IB, peripheral (T2a, N0); Stage I, central (T1abc-T2a, N0); "
     "Stage II (T1abc-T2ab, N1; T2b, N0); Stage IIB (T3, N0); Stage IIIA (T3, N1)",
     "Clinical stage", "NSCL-2"),
    ("n02", DC,
     "Stage IB (peripheral T2a, N0) Stage I (central T1abc-T2a, N0) "
     "Stage II (T1abc-T2ab, N1; T2b, N0) Stage IIB (T3, N0) Stage IIIA (T3, N1)",
     "Pretreatment evaluation", "NSCL-2"),
    ("n03", EV,
     "Evaluate for perioperative therapy , PFTs (if not previously done) , Bronchoscopy, "
     "Pathologic mediastinal lymph node evaluation , FDG-PET/CT scan (if not previously done) , "
     "Brain MRI with contrast (Stage II, IIIA) (Stage IB [optional])",
     "Pretreatment evaluation", "NSCL-2"),
    ("n04", DC, "No nodal disease", "Pretreatment evaluation", "NSCL-2"),
    ("n05", DC, "Operable", "Surgical assessment", "NSCL-2"),
    ("n06", TO,
     "Surgical exploration and resection + mediastinal lymph node dissection or systematic "
     "lymph node sampling after preoperative systemic therapy, if planned",
     "Initial treatment", "NSCL-2"),
    # stage IIIB workup strand (n07..n12)
    ("n07", DC, "Stage IIIB (T4, N2) Stage IIIC (T4, N3)", "Clinical presentation", "NSCL-9"),
    ("n08", EV,
     "FDG-PET/CT scan (if not previously done) , Brain MRI with contrast , Pathologic "
     "confirmation of N2-3 disease by either: Mediastinoscopy Supraclavicular lymph node "
     "biopsy Thoracoscopy Needle biopsy Mediastinotomy EUS biopsy EBUS biopsy",
     "Pretreatment evaluation", "NSCL-9"),
    ("n09", DC, "Contralateral mediastinal node negative", "Pretreatment evaluation", "NSCL-9"),
    ("n10", DC, "Ipsilateral mediastinal node negative (T4, N0-1)", "Pretreatment evaluation", "NSCL-9"),
    ("n11", DC, "Stage IIIA (T4, N0-1) unresectable", "Initial treatment", "NSCL-9"),
    ("n12", TO, "Definitive concurrent chemoradiation (category 1)", "Initial treatment", "NSCL-9"),
    # superior sulcus strand (n13..n16)
    ("n13", DC, "Superior sulcus", "Superior sulcus tumors", "NSCL-5"),
    ("n14", DC, "Resectable", "Superior sulcus tumors", "NSCL-5"),
    ("n15", DC, "Unresectable", "Superior sulcus tumors", "NSCL-5"),
    ("n16", TO, "Preoperative concurrent chemoradiation", "Superior sulcus tumors", "NSCL-5"),
    # adrenal metastasis strand (n17..n24)
    ("n17", DC, "Solitary adrenal metastasis", "Stage IVA, M1b", "NSCL-17"),
    ("n18", EV, "Multidisciplinary evaluation", "Stage IVA, M1b", "NSCL-17"),
    ("n19", DC, "Adrenal lesion confirmed", None, "NSCL-17"),
    ("n20", EV, "Biomarker testing", "Adrenal metastasis workup", "NSCL-17"),
    ("n21", DC, "Negative for additional metastases", None, "NSCL-17"),
    ("n22", DC, "Definitive local therapy possible", "Adrenal metastasis workup", "NSCL-17"),
    ("n23", DC, "Operable adrenal lesion", "Adrenal metastasis workup", "NSCL-17"),
    ("n24", TO, "Adrenalectomy", "Adrenal metastasis workup", "NSCL-17"),
    # first-page hub and stage IA page (n25..n32)
    ("n25", EV,
     "Pathology review, History and physical, CT chest and upper abdomen with contrast, "
     "CBC with differential, Smoking cessation counseling",
     "Initial evaluation", "NSCL-1"),
    ("n26", DC, "Stage IA, peripheral (T1abc, N0)", "Clinical stage", "NSCL-3"),
    ("n27", EV,
     "PFTs, Bronchoscopy, Consider pathologic mediastinal lymph node evaluation, "
     "FDG-PET/CT scan (if not previously done)",
     "Pretreatment evaluation", "NSCL-3"),
    ("n28", DC, "Negative mediastinal nodes", "Pretreatment evaluation", "NSCL-3"),
    ("n29", DC, "Medically operable", "Surgical assessment", "NSCL-3"),
    ("n30", TO,
     "Surgical exploration and resection + mediastinal lymph node dissection or "
     "systematic lymph node sampling",
     "Initial treatment", "NSCL-3"),
    ("n31", DC, "Medically inoperable", "Surgical assessment", "NSCL-3"),
    ("n32", TO, "Definitive RT including SABR", "Initial treatment", "NSCL-3"),
    # surveillance loop (n33..n38)
    ("n33", EV, "Tumor response evaluation", "Surveillance", "NSCL-16"),
    ("n34", DC, "Progression", "Surveillance", "NSCL-16"),
    ("n35", TO, "Systemic therapy", "Therapy for recurrence", "NSCL-16"),
    ("n36", EV, "Surveillance imaging: CT chest with contrast every 6 months", "Surveillance", "NSCL-16"),
    ("n37", DC, "Local recurrence", "Surveillance", "NSCL-16"),
    ("n38", TO, "External beam RT or chemoradiation", "Therapy for recurrence", "NSCL-16"),
]

EDGES = [
    # early-stage strand
    ("n01", "n02"), ("n02", "n03"), ("n03", "n04"), ("n04", "n05"), ("n05", "n06"),
    # stage IIIB strand
    ("n07", "n08"), ("n08", "n09"), ("n09", "n10"), ("n10", "n11"), ("n11", "n12"),
    # superior sulcus strand
    ("n13", "n14"), ("n13", "n15"), ("n14", "n16"), ("n15", "n12"),
    # adrenal strand (deliberately long: seven hops to its treatment)
    ("n17", "n18"), ("n18", "n19"), ("n19", "n20"), ("n20", "n21"),
    ("n21", "n22"), ("n22", "n23"), ("n23", "n24"),
    # first-page hub branches into every strand
    ("n25", "n26"), ("n25", "n01"), ("n25", "n07"), ("n25", "n17"), ("n25", "n13"),
    # stage IA page
    ("n26", "n27"), ("n27", "n28"), ("n28", "n29"), ("n28", "n31"),
    ("n29", "n30"), ("n31", "n32"),
    # surveillance loop
    ("n30", "n33"), ("n32", "n33"), ("n33", "n34"), ("n34", "n35"),
    ("n33", "n36"), ("n36", "n37"), ("n37", "n38"), ("n34", "n38"),
    # cross links between strands
    ("n10", "n27"), ("n04", "n31"), ("n05", "n30"), ("n35", "n33"),
    ("n37", "n35"), ("n16", "n33"), ("n12", "n33"), ("n06", "n33"), ("n24", "n33"),
]


def build_graph() -> GuidelineGraph:
    nodes = tuple(
        GuidelineNode(id=i, content=content, context=context, category=category, page=page)
        for i, category, content, context, page in NODES
    )
    edges = tuple(GuidelineEdge(source=s, target=t) for s, t in EDGES)
    return label_all_relations(GuidelineGraph(version="nscl-mini-2.2024", nodes=nodes, edges=edges))


EXEMPLARS = [
    ("Concurrent chemoradiation", "Initial treatment", TO),
    ("Adjuvant systemic therapy", "Adjuvant treatment", TO),
    ("Consider RT", None, TO),
    ("Stereotactic ablative radiotherapy", "Initial treatment", TO),
    ("Chemotherapy doublet", "Therapy for recurrence", TO),
    ("Surgical re-resection", None, TO),
    ("Durvalumab maintenance", "Consolidation", TO),
    ("Progression", "Surveillance", DC),
    ("Operable", "Surgical assessment", DC),
    ("Unresectable", None, DC),
    ("N3 positive", "Pretreatment evaluation", DC),
    ("Definitive local therapy possible", None, DC),
    ("Recurrence suspected", "Surveillance", DC),
    ("Metastatic disease limited to brain", "Stage IVA workup", DC),
    ("Margins positive", "Postoperative findings", DC),
    ("Medically inoperable", "Surgical assessment", DC),
    ("Multidisciplinary evaluation", None, EV),
    ("PFTs, FDG-PET/CT scan, Brain MRI with contrast", "Pretreatment evaluation", EV),
    ("Biomarker testing", "Molecular workup", EV),
    ("Tumor response evaluation", "Surveillance", EV),
    ("Bronchoscopy with biopsy", None, EV),
    ("Chest CT with contrast", "Surveillance", EV),
    ("Mediastinoscopy", "Pretreatment evaluation", EV),
]

LEXICON = {
    "treatment": ["therapy", "chemoradiation", "resection", "RT", "surgery", "treatment"],
    "evaluation": ["scan", "MRI", "biopsy", "testing", "evaluation", "PET", "PFTs"],
}

QUERIES = {
    "set_a_handwritten.cql": """\
match (n:Disease_Condition)
where
tolower(n.content) contains "stage i"
and tolower(n.content) contains "central"
and tolower(n.context) contains "clinical stage"
with n
match path=(n)-[*2..5]->(t:Treatment_Option)
return path,nodes(path);
""",
    "set_a_generated.cql": """\
MATCH (n:Disease_Condition)
WHERE
toLower(n.content) CONTAINS "stage i, central (t1abc-t2a, n0)" AND
toLower(n.context) CONTAINS "clinical stage"
WITH n
MATCH path=(n)-[*2..5]->(t:Treatment_Option)
RETURN path, nodes(path);
""",
    "set_b_handwritten.cql": """\
match path=(n:Disease_Condition)
-[*1..6]->(c1:Disease_Condition)
-[*1..4]->(c2:Disease_Condition)
-[*1..4]->(t:Treatment_Option)
where tolower(n.content) contains
tolower("Stage IIIB (T4, N2)")
and tolower(c1.content) contains
tolower('Contralateral mediastinal node negative')
and tolower(c2.content) contains
tolower('ipsilateral mediastinal node negative')
return path,nodes(path),t.content
""",
    "set_b_generated.cql": """\
MATCH path=(n:Disease_Condition)
-[*1..4]->(c1:Disease_Condition)
-[*1..4]->(c2:Disease_Condition)
-[*1..3]->(t:Treatment_Option) WHERE
toLower(n.content) CONTAINS "stage iiib (t4, n2)"
AND toLower(c1.content) CONTAINS
"contralateral mediastinal node negative"
AND toLower(c2.content) CONTAINS
"ipsilateral mediastinal node negative"
RETURN path, nodes(path), t.content;
""",
}

TRAIN_A = [
    ("qa01", "What is the general treatment approach for Stage IA, peripheral (T1abc, N0)?",
     'MATCH (n:Disease_Condition)\n'
     'WHERE toLower(n.content) CONTAINS "stage ia" AND toLower(n.context) CONTAINS "clinical stage"\n'
     'WITH n\nMATCH path=(n)-[*2..5]->(t:Treatment_Option)\nRETURN path, nodes(path)'),
    ("qa02", "Which treatment follows operable disease?",
     'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "operable"\nRETURN path, nodes(path)'),
    ("qa03", "What is the treatment pathway for Stage II disease?",
     'MATCH (n:Disease_Condition)\n'
     'WHERE toLower(n.content) CONTAINS "stage ii" AND toLower(n.context) CONTAINS "clinical stage"\n'
     'WITH n\nMATCH path=(n)-[*2..5]->(t:Treatment_Option)\nRETURN path, nodes(path)'),
]

TRAIN_B = [
    ("qb01", "What is the treatment for a patient with contralateral mediastinal node negative "
             "and ipsilateral mediastinal node negative findings?",
     'MATCH path=(c1:Disease_Condition)-[*1..4]->(c2:Disease_Condition)-[*1..4]->(t:Treatment_Option)\n'
     'WHERE toLower(c1.content) CONTAINS "contralateral mediastinal node negative"\n'
     'AND toLower(c2.content) CONTAINS "ipsilateral mediastinal node negative"\n'
     'RETURN path, nodes(path), t.content'),
    ("qb02", "Which treatment is recommended for a resectable superior sulcus tumor?",
     'MATCH path=(n:Disease_Condition)-[*1..3]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "resectable" AND toLower(n.context) CONTAINS "superior sulcus"\n'
     'RETURN path, nodes(path), t.content'),
    ("qb03", "What should be done after a solitary adrenal metastasis is found?",
     'MATCH path=(n:Disease_Condition)-[*1..8]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "solitary adrenal metastasis"\n'
     'RETURN path, nodes(path)'),
    ("qb04", "What is the next step when surveillance imaging indicates local recurrence?",
     'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "local recurrence"\nRETURN path, nodes(path), t.content'),
    ("qb05", "Which treatment applies when the disease progresses during surveillance?",
     'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "progression"\nRETURN path, nodes(path), t.content'),
    ("qb06", "What is recommended for a medically inoperable patient with negative mediastinal nodes?",
     'MATCH path=(c1:Disease_Condition)-[*1..2]->(c2:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
     'WHERE toLower(c1.content) CONTAINS "negative mediastinal nodes"\n'
     'AND toLower(c2.content) CONTAINS "medically inoperable"\nRETURN path, nodes(path), t.content'),
    ("qb07", "What happens after biomarker testing in the adrenal metastasis workup?",
     'MATCH path=(n:Evaluation)-[*1..5]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "biomarker testing"\nRETURN path, nodes(path)'),
    ("qb08", "Which evaluation precedes the disease condition of no nodal disease?",
     'MATCH path=(n:Evaluation)-[]->(c:Disease_Condition)\n'
     'WHERE toLower(c.content) CONTAINS "no nodal disease"\nRETURN path, nodes(path)'),
    ("qb09", "What is the treatment pathway for an unresectable superior sulcus tumor?",
     'MATCH path=(n:Disease_Condition)-[*1..3]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "unresectable" AND toLower(n.context) CONTAINS "superior sulcus"\n'
     'RETURN path, nodes(path), t.content'),
    ("qb10", "Which treatment follows a Stage IIIA (T4, N0-1) unresectable finding?",
     'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
     'WHERE toLower(n.content) CONTAINS "stage iiia (t4, n0-1) unresectable"\n'
     'RETURN path, nodes(path), t.content'),
]

TEST_A_TEXTS = [
    ("qa04", "What is the treatment pathway for Stage I, central (T1abc-T2a, N0)?"),
    ("qa05", "What is the general treatment approach for Stage IB, peripheral (T2a, N0)?"),
    ("qa06", "What is the treatment pathway for Stage IIB (T3, N0) disease?"),
    ("qa07", "What is the general treatment approach for Stage IIIA (T3, N1)?"),
    ("qa08", "Which treatments follow a Stage I central tumor?"),
    ("qa09", "What is the treatment pathway for Stage IIIC (T4, N3)?"),
    ("qa10", "What is the general treatment approach for Stage IV disease?"),
    ("qa11", "What is the treatment pathway for Stage IA disease?"),
    ("qa12", "Which treatment options exist for Stage II (T1abc-T2ab, N1)?"),
    ("qa13", "What is the general treatment approach for T2b, N0 tumors?"),
    ("qa14", "What is the treatment pathway after pretreatment evaluation for Stage I?"),
    ("qa15", "Which treatments are reachable from the clinical staging page?"),
    ("qa16", "What is the general treatment approach for early-stage disease?"),
    ("qa17", "What is the treatment pathway for operable early-stage disease?"),
    ("qa18", "What is the treatment pathway for medically inoperable early-stage disease?"),
    ("qa19", "Which treatment follows negative mediastinal nodes?"),
    ("qa20", "What is the general treatment approach when PFTs are required?"),
    ("qa21", "What is the treatment pathway for peripheral T1abc tumors?"),
    ("qa22", "Which treatments follow the initial evaluation page?"),
    ("qa23", "What is the general treatment approach after smoking cessation counseling?"),
    ("qa24", "What is the treatment pathway for central T2a tumors?"),
    ("qa25", "Which treatment options follow surgical assessment for Stage I?"),
    ("qa26", "What is the general treatment approach for node-negative disease?"),
]

TEST_B_TEXTS = [
    ("qb11", "What is the recommended treatment for progression after definitive RT?"),
    ("qb12", "Which treatment applies to a superior sulcus tumor invading the chest wall?"),
    ("qb13", "What is the treatment for recurrence limited to the mediastinum?"),
    ("qb14", "What is the recommended treatment for a resectable superior sulcus tumor "
             "with N3 disease?"),
    ("qb15", "Which treatment follows a bone scan with contrast showing progression?"),
    ("qb16", "What is the treatment for stage i, central (t1abc-t2a, n0) treatment naive disease?"),
    ("qb17", "What is the recommended option for an unresectable superior sulcus disease with "
             "mediastinal involvement?"),
    ("qb18", "Which treatment applies after a negative brain perfusion study?"),
    ("qb19", "What is the treatment for multifocal lung adenocarcinoma with diffuse nodules?"),
    ("qb20", "What should follow a positive liquid biopsy panel for EGFR?"),
    ("qb21", "Which treatment is indicated for synchronous solitary brain metastasis?"),
    ("qb22", "What is the treatment pathway for a solitary adrenal metastasis confirmed by "
             "multidisciplinary evaluation?"),
    ("qb23", "Which treatment eventually follows adrenal biomarker testing?"),
    ("qb24", "What is the recommended treatment after a confirmed adrenal lesion?"),
    ("qb25", "What is the recommended treatment option for a Stage IIIB (T4, N2) patient with "
             "contralateral mediastinal node negative and ipsilateral mediastinal node negative?"),
    ("qb26", "What is the treatment for a Stage IIIB (T4, N3) patient after pathologic confirmation?"),
    ("qb27", "Which treatment follows contralateral mediastinal node negative findings?"),
    ("qb28", "What is the next treatment for ipsilateral mediastinal node negative (T4, N0-1)?"),
    ("qb29", "What is recommended after Stage IIIA (T4, N0-1) unresectable is established?"),
    ("qb30", "Which treatment applies to a resectable superior sulcus presentation?"),
    ("qb31", "What is the treatment for an unresectable superior sulcus presentation?"),
    ("qb32", "What follows the multidisciplinary evaluation of an adrenal lesion?"),
    ("qb33", "Which treatment is reached after definitive local therapy is deemed possible?"),
    ("qb34", "What is the treatment for an operable adrenal lesion?"),
    ("qb35", "Which treatment follows progression found during surveillance?"),
    ("qb36", "What is recommended when surveillance imaging indicates local recurrence?"),
    ("qb37", "Which systemic option applies to recurrence after chemoradiation?"),
    ("qb38", "What is the treatment after tumor response evaluation shows progression?"),
    ("qb39", "Which treatment follows PFTs and bronchoscopy for stage IA disease?"),
    ("qb40", "What is the treatment for medically operable stage IA disease?"),
    ("qb41", "What is recommended for medically inoperable stage IA disease?"),
    ("qb42", "Which treatment follows no nodal disease and operability?"),
    ("qb43", "What treatment does the guideline reach from the stage IIIB workup?"),
    ("qb44", "Which treatment concludes the superior sulcus pathway?"),
    ("qb45", "What treatment concludes the adrenal metastasis pathway?"),
    ("qb46", "Which treatments are reachable from the surveillance loop?"),
]

# --- scripted replies for the evaluation transcript ---

REPLY_TYPE_I = [
    "MATCH (n RETURN n",
    'MATCH (n:Disease_Condition WHERE n.content CONTAINS "stage" RETURN n,',
    "MATCH path=(n)-[*2..]->(t) RETURN path",
    'MATCH (n:Stage)-[]->(t) RETURN t',
]

_TYPE_II_TEMPLATE = (
    'MATCH (n:Disease_Condition)\nWHERE toLower(n.content) CONTAINS "{needle}"\n'
    "WITH n\nMATCH path=(n)-[*1..5]->(t:Treatment_Option)\nRETURN path, nodes(path)"
)
REPLY_TYPE_II = [
    _TYPE_II_TEMPLATE.format(needle=needle)
    for needle in (
        "resectable superior sulcus",
        "stage i, central (t1abc-t2a, n0) treatment naive",
        "bone scan with contrast",
        "unresectable superior sulcus disease",
        "brain perfusion study",
        "multifocal lung adenocarcinoma",
        "liquid biopsy panel",
        "synchronous solitary brain metastasis",
        "mediastinum-limited recurrence",
        "chest wall invasion",
        "diffuse nodules",
    )
]

REPLY_TYPE_III = [
    'MATCH path=(n:Disease_Condition)-[*1..4]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "solitary adrenal metastasis"\n'
    'AND toLower(t.content) CONTAINS "adrenalectomy"\nRETURN path, nodes(path)',
    'MATCH path=(n:Disease_Condition)-[*2..3]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "solitary adrenal metastasis"\n'
    'AND toLower(t.content) CONTAINS "adrenalectomy"\nRETURN path, nodes(path)',
    'MATCH path=(n:Disease_Condition)-[*1..2]->(e:Evaluation)\n'
    'WHERE toLower(n.content) CONTAINS "solitary adrenal"\n'
    'AND toLower(e.content) CONTAINS "biomarker testing"\nRETURN path, nodes(path)',
]

REPLY_NO_ERROR = [
    'MATCH path=(n:Disease_Condition)-[]->(t:Treatment_Option)\nRETURN path, nodes(path)',
    'MATCH path=(n:Disease_Condition)-[*1..4]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "progression"\nRETURN path, nodes(path)',
    'MATCH path=(n:Evaluation)-[*1..3]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "pfts"\nRETURN path, nodes(path)',
    'MATCH path=(n:Disease_Condition)-[*1..3]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "superior sulcus"\nRETURN path, nodes(path), t.content',
    'MATCH path=(n:Disease_Condition)-[*1..6]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "local recurrence"\nRETURN path, nodes(path)',
    'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "medically inoperable"\nRETURN path, nodes(path), t.content',
    'MATCH path=(n:Disease_Condition)-[*1..2]->(t:Treatment_Option)\n'
    'WHERE toLower(n.content) CONTAINS "operable"\nRETURN path, nodes(path)',
    'MATCH path=(n:Evaluation)-[]->(c:Disease_Condition)\n'
    'WHERE toLower(c.content) CONTAINS "no nodal disease"\nRETURN path, nodes(path)',
]

# per test question: which error class its scripted reply must trigger
ASSIGNMENT_A = {
    "qa05": "I",
    "qa06": "II", "qa07": "II", "qa08": "II",
    "qa09": "III", "qa10": "III",
}
ASSIGNMENT_B = {
    "qb11": "I", "qb12": "I", "qb13": "I",
    "qb14": "II", "qb15": "II", "qb16": "II", "qb17": "II",
    "qb18": "II", "qb19": "II", "qb20": "II", "qb21": "II",
    "qb22": "III", "qb23": "III", "qb24": "III",
}
# everything else is NoError; these two echo the sample generated queries
GENERATED_OVERRIDES = {"qa04": "set_a_generated.cql", "qb25": "set_b_generated.cql"}


def build_dataset() -> list[dict]:
    entries = []
    for qid, text, gold in TRAIN_A:
        entries.append({"id": qid, "text": text, "set": "A", "split": "train",
                        "goldQuery": gold, "expectedLiterals": None})
    for qid, text in TEST_A_TEXTS:
        entries.append({"id": qid, "text": text, "set": "A", "split": "test",
                        "goldQuery": None, "expectedLiterals": None})
    for qid, text, gold in TRAIN_B:
        entries.append({"id": qid, "text": text, "set": "B", "split": "train",
                        "goldQuery": gold, "expectedLiterals": None})
    for qid, text in TEST_B_TEXTS:
        entries.append({"id": qid, "text": text, "set": "B", "split": "test",
                        "goldQuery": None, "expectedLiterals": None})
    return entries


def assign_replies(dataset: list[dict]) -> dict[str, str]:
    """Map question id -> scripted generated-query reply."""
    assignment = dict(ASSIGNMENT_A)
    assignment.update(ASSIGNMENT_B)
    pools = {"I": REPLY_TYPE_I, "II": REPLY_TYPE_II, "III": REPLY_TYPE_III, "": REPLY_NO_ERROR}
    cursors = {key: 0 for key in pools}
    replies = {}
    for entry in dataset:
        if entry["split"] != "test":
            continue
        qid = entry["id"]
        if qid in GENERATED_OVERRIDES:
            replies[qid] = QUERIES[GENERATED_OVERRIDES[qid]].rstrip("\n")
            continue
        kind = assignment.get(qid, "")
        pool = pools[kind]
        replies[qid] = pool[cursors[kind] % len(pool)]
        cursors[kind] += 1
    return replies


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "queries").mkdir(exist_ok=True)

    graph = build_graph()
    (FIXTURES / "nscl-mini.json").write_bytes(export_graph(graph))

    gold = {i: category.value for i, category, *_ in NODES}
    (FIXTURES / "gold-labels.json").write_text(
        json.dumps(gold, indent=2) + "\n", encoding="utf-8"
    )

    exemplars = [
        {"content": content, "context": context, "label": label.value}
        for content, context, label in EXEMPLARS
    ]
    (FIXTURES / "exemplars.json").write_text(
        json.dumps(exemplars, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    (FIXTURES / "lexicon.json").write_text(
        json.dumps(LEXICON, indent=2) + "\n", encoding="utf-8"
    )

    for name, text in QUERIES.items():
        (FIXTURES / "queries" / name).write_text(text, encoding="utf-8")

    dataset = build_dataset()
    (FIXTURES / "qa-dataset.json").write_text(
        json.dumps(dataset, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    questions = load_questions((FIXTURES / "qa-dataset.json").read_bytes())
    exemplar_pairs = train_exemplars(questions)
    schema = default_schema_summary()
    replies = assign_replies(dataset)
    eval_entries = []
    for question in questions:
        if question.split != "test":
            continue
        prompt = build_query_prompt(schema, exemplar_pairs, question.text)
        eval_entries.append(
            {"prompt_sha256": prompt_sha256(prompt), "reply": replies[question.id]}
        )
    save_transcript(eval_entries, FIXTURES / "transcript-eval.jsonl")

    # ask demo: the hand-written early-stage query for the first test question
    ask_prompt = build_query_prompt(schema, exemplar_pairs, TEST_A_TEXTS[0][1])
    save_transcript(
        [{"prompt_sha256": prompt_sha256(ask_prompt),
          "reply": QUERIES["set_a_handwritten.cql"].rstrip("\n")}],
        FIXTURES / "transcript-ask.jsonl",
    )

    print(f"fixtures written to {FIXTURES}")
    print(f"  nodes: {len(NODES)}  edges: {len(EDGES)}  questions: {len(dataset)}")


if __name__ == "__main__":
    main()
