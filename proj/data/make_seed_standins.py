#!/usr/bin/env python3
"""Regenerates seed_instances.jsonl.

The shipped seed set uses synthetic stand-in instances (the original
hand-annotated seed data is not redistributable). Counts mirror the published
seed supervision: 228 binary-task and 265 math-task instances. The first line
is a meta record flagging the stand-in provenance for run manifests.
"""

import json

OUT = "seed_instances.jsonl"

TEMPLATES = {
    "cot": "Answer this question by thinking step by step. Question: {q} Output:",
    "abs": "Convert this question to the abstract form. Question: {q} Output:",
    "sim": ("Generate a list of concrete questions that fit the abstract question. "
            "Abstract Question: {aq} Output:"),
    "q2p": ("Solve this question with a Python program with necessary abstractions. "
            "Also generate the corresponding values for the parameters. Question: {q} Output:"),
    "math_q2kc": "Extract the given conditions in the math question. Question: {q} Output:",
    "math_q2nq": ("Decompose the math question to steps, based on currently known conditions. "
                  "Question: {q} Known Conditions: {c} Output:"),
    "qa2s": ("Convert the given math question and its answer to a statement. "
             "Question: {q} Answer: {a} Output:"),
}

ANIMALS = ["ant", "bear", "crow", "deer", "eel", "fox", "goat", "hare", "ibis",
           "jay", "koala", "lynx", "mole", "newt", "otter", "pony", "quail",
           "raven", "seal", "toad"]
ITEMS = ["pens", "mugs", "books", "ropes", "tiles", "seeds", "nails", "jars",
         "caps", "bulbs"]


def binary_program(animal):
    return (
        'def answer(animal: str) -> bool:\n'
        '    weight = ask_llm("What is the typical weight of a " + animal + " in kg?", float)\n'
        '    limit = ask_llm("What is the carry limit of a standard postal parcel in kg?", float)\n'
        '    return weight < limit\n'
        f'answer("{animal}")\n')


def math_program(a, b, c):
    return (
        'def answer(unit_count: int, unit_price: int, paid: int) -> float:\n'
        '    spent = unit_count * unit_price\n'
        '    change = paid - spent\n'
        '    return change / unit_count\n'
        f'answer({a}, {b}, {c})\n')


def main():
    lines = [json.dumps({"meta": {
        "seed_source": "synthetic stand-ins mirroring published seed counts"}})]

    def emit(task, slots, target, qid):
        lines.append(json.dumps({
            "task": task,
            "input": TEMPLATES[task].format(**slots),
            "target": target,
            "origin": "seed",
            "origin_question_id": qid,
            "provenance": "seed stand-in",
        }))

    # 228 binary-task instances: abs / sim / q2p / cot, round-robin
    for i in range(228):
        animal = ANIMALS[i % len(ANIMALS)]
        q = f"Can you mail a {animal} in a standard postal parcel? (case {i})"
        aq = f"Can you mail an ANIMAL in a standard postal parcel? (case {i})"
        qid = f"seed-bin-{i:03d}"
        task = ["abs", "sim", "q2p", "cot"][i % 4]
        if task == "abs":
            emit(task, {"q": q}, f"So the question becomes {aq}", qid)
        elif task == "sim":
            emit(task, {"aq": aq},
                 f"1. Can you mail a {ANIMALS[(i + 1) % len(ANIMALS)]} in a standard postal "
                 f"parcel? (case {i})\n2. Can you mail a {ANIMALS[(i + 2) % len(ANIMALS)]} in a "
                 f"standard postal parcel? (case {i})", qid)
        elif task == "q2p":
            emit(task, {"q": q}, binary_program(animal), qid)
        else:
            emit(task, {"q": q},
                 f"A {animal} may not fit the parcel weight limit. So no.", qid)

    # 265 math-task instances: abs / q2p / math_q2kc / math_q2nq / qa2s
    for i in range(265):
        item = ITEMS[i % len(ITEMS)]
        count, price = 2 + i % 7, 3 + i % 5
        paid = count * price + count * (1 + i % 4)
        q = (f"Ada bought {count} {item} for {price} dollars each and paid {paid} dollars. "
             f"How much change per item did she get? (case {i})")
        kc = (f"Ada bought {count} {item} for {price} dollars each. "
              f"Ada paid {paid} dollars.")
        qid = f"seed-math-{i:03d}"
        task = ["abs", "q2p", "math_q2kc", "math_q2nq", "qa2s"][i % 5]
        if task == "abs":
            emit(task, {"q": q},
                 "So the question becomes Ada bought Unit Count X for Unit Price Y dollars "
                 f"each and paid Paid Z dollars. How much change per item did she get? (case {i}) "
                 f"With parameters unit_count={count}, unit_price={price}, paid={paid}", qid)
        elif task == "q2p":
            emit(task, {"q": q}, math_program(count, price, paid), qid)
        elif task == "math_q2kc":
            emit(task, {"q": q}, kc.replace(". ", ".\n"), qid)
        elif task == "math_q2nq":
            emit(task, {"q": q, "c": kc},
                 f"How much did Ada spend on the {item} in total? (case {i})", qid)
        else:
            spent = count * price
            emit(task, {"q": f"How much did Ada spend on the {item} in total? (case {i})",
                        "a": str(spent)},
                 f"Ada spent {spent} dollars on the {item} in total.", qid)

    with open(OUT, "w") as f:
        f.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} instances to {OUT}")


if __name__ == "__main__":
    main()
