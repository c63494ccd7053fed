#!/usr/bin/env python3
"""Regenerate the toy fixtures under fixtures/.

Output is fully determined by the seed below, so re-running leaves the
checked-in files unchanged.
"""

import argparse
import csv
import json
import random
from pathlib import Path

SEED = 20240611

DATASET_DRUGS = [
    "cisplatin", "camptothecin", "paclitaxel", "gemcitabine", "doxorubicin", "erlotinib",
    "lapatinib", "sorafenib", "vorinostat", "bortezomib", "olaparib", "temozolomide",
    "etoposide", "docetaxel", "everolimus", "dasatinib", "gefitinib", "imatinib",
    "nilotinib", "sunitinib", "trametinib", "vemurafenib", "selumetinib", "crizotinib",
]
# Mentioned in the corpus and known to the mock model, absent from the dataset.
EXTRA_DRUGS = ["afatinib", "cabozantinib", "dabrafenib", "ibrutinib", "ruxolitinib", "palbociclib",
               "rapamycin", "topotecan", "irinotecan", "oxaliplatin", "carboplatin", "vinorelbine"]
# Drugs listed in the external vocabulary file.
LISTED_DRUGS = ["afatinib", "dabrafenib", "palbociclib", "topotecan", "oxaliplatin", "carboplatin"]

DATASET_CELLS = ["BT-483", "MCF7", "A549", "HCT116", "PC-3", "SK-OV-3", "HT-29", "U251"]
EXTRA_CELLS = ["HeLa", "T47D", "OVCAR-8", "SW620", "K562"]
LISTED_CELLS = ["HeLa", "T47D", "OVCAR-8"]

SYNERGY_PATTERNS = [
    "{a} and {b} combination treatments had synergistic growth inhibitory effects in {c} cells.",
    "The combination of {a} with {b} showed strong synergy in {c} cells.",
    "{a} acted synergistically with {b} to induce apoptosis in the {c} cell line.",
    "In {c} cells, {a} synergizes with {b} to suppress proliferation.",
    "We observed a synergistic interaction between {a} and {b} in {c} xenografts.",
    "Co-treatment with {a} and {b} resulted in synergistic cytotoxicity against {c} cells.",
    "{a} plus {b} produced marked synergism in {c} cells, with combination index values below 0.5.",
    "Synergistic inhibition of {c} cell growth was achieved by combining {a} and {b}.",
    "{a} enhanced the activity of {b} synergistically in {c} cells.",
    "The {a}/{b} pair was synergistic in {c} cells but additive elsewhere.",
    "Low doses of {a} and {b} were synergistic in {c} spheroids.",
    "Combined {a} and {b} treatment synergistically reduced viability of {c} cells.",
]
NEAR_MISS_PATTERNS = [
    "{a} showed synergistic activity in {c} cells when given after radiation.",
    "{a} and {b} were tested in {c} cells without evidence of interaction.",
    "Synergy between {a} and {b} was previously reported in other models.",
    "{a} and {b} were antagonistic in {c} cells.",
]
FILLER = [
    "Drug combinations are widely used in oncology.",
    "Cell viability was measured after 72 h using a standard assay.",
    "These findings were confirmed in three independent experiments.",
    "Combination index values were calculated as described by Chou et al. in earlier work.",
    "Dose-response curves were fitted with a four-parameter logistic model, e.g. for single agents.",
    "Mechanistic studies implicated the DNA damage response.",
    "Resistance emerged after prolonged exposure to monotherapy.",
    "Our results support further evaluation in clinical trials.",
    "Western blotting revealed reduced phosphorylation of ERK vs. untreated controls.",
    "Fig. 2 summarizes the response of each line.",
]
TITLES = ["Combination screening in {c} cells", "Targeted therapy combinations", "Drug interactions in solid tumours",
          "Synergy of {a} with standard chemotherapy", "Overcoming resistance with rational combinations"]


def capitalize(s):
    return s[0].upper() + s[1:]


def latent(names, rng, scale):
    return {n: rng.gauss(0.0, scale) for n in names}


def make_dataset(rng):
    drug_score = latent(DATASET_DRUGS, rng, 1.0)
    cell_score = latent(DATASET_CELLS, rng, 0.6)
    rows = {}
    while len(rows) < 320:
        a, b = rng.sample(DATASET_DRUGS, 2)
        c = rng.choice(DATASET_CELLS)
        key = (min(a, b), max(a, b), c)
        if key in rows:
            continue
        s = drug_score[a] + drug_score[b] + cell_score[c] + rng.gauss(0.0, 0.5)
        rows[key] = 1 if s > 1.0 else 0
    ordered = sorted(rows.items())
    return [(a, b, c, y) for (a, b, c), y in ordered]


def make_corpus(rng, dataset):
    positives = [(a, b, c) for a, b, c, y in dataset if y == 1]
    docs = []
    for i in range(80):
        sentences = []
        n_syn = rng.choice([0, 1, 1, 2, 2, 3])
        for _ in range(n_syn):
            pattern = rng.choice(SYNERGY_PATTERNS)
            roll = rng.random()
            if roll < 0.45 and positives:
                a, b, c = rng.choice(positives)
            elif roll < 0.75:
                a = rng.choice(EXTRA_DRUGS)
                b = rng.choice(DATASET_DRUGS + EXTRA_DRUGS)
                c = rng.choice(DATASET_CELLS + EXTRA_CELLS)
            else:
                a, b = rng.sample(DATASET_DRUGS, 2)
                c = rng.choice(DATASET_CELLS)
            if a == b:
                b = rng.choice([d for d in DATASET_DRUGS if d != a])
            if rng.random() < 0.5:
                a, b = b, a
            sentences.append(capitalize(pattern.format(a=a, b=b, c=c)))
        for _ in range(rng.choice([0, 1, 1, 2])):
            a, b = rng.sample(DATASET_DRUGS, 2)
            sentences.append(capitalize(rng.choice(NEAR_MISS_PATTERNS).format(a=a, b=b, c=rng.choice(DATASET_CELLS))))
        sentences += rng.sample(FILLER, rng.randint(2, 4))
        rng.shuffle(sentences)
        a = rng.choice(DATASET_DRUGS)
        title = rng.choice(TITLES).format(a=a, c=rng.choice(DATASET_CELLS))
        docs.append({"doc_id": f"PMID{31000000 + i * 37}", "title": title, "text": " ".join(sentences)})
    return docs


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent.parent / "fixtures")
    args = parser.parse_args()
    out = args.out
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)

    dataset = make_dataset(rng)
    with open(out / "dataset.csv", "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["drug_a", "drug_b", "cell_line", "label"])
        w.writerows(dataset)

    with open(out / "corpus.jsonl", "w") as f:
        for doc in make_corpus(rng, dataset):
            f.write(json.dumps(doc, sort_keys=True) + "\n")

    with open(out / "vocab.tsv", "w") as f:
        f.write("surface\ttype\tsource\n")
        for d in LISTED_DRUGS:
            f.write(f"{d}\tdrug\tlincs\n")
        for c in LISTED_CELLS:
            f.write(f"{c}\tcell_line\tccle\n")

    with open(out / "mock_tokens.tsv", "w") as f:
        f.write("# token<TAB>kind for the mock gateway\n")
        for d in sorted(set(DATASET_DRUGS + EXTRA_DRUGS)):
            f.write(f"{d}\tdrug\n")
        for c in sorted(set(DATASET_CELLS + EXTRA_CELLS)):
            f.write(f"{c.lower()}\tcell\n")


if __name__ == "__main__":
    main()
