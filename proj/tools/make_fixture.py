#!/usr/bin/env python3
"""Generates the synthetic multi-hop fixtures under tests/data.

Every question is a two-hop bridge question: one sentence links the entity in
the question to a second article, and a sentence of that article holds the
answer. The alphabetically first title always belongs to a distractor article,
and no reversed question token occurs in any context sentence.

Usage: make_fixture.py OUT_DIR
"""

import json
import random
import re
import string
import sys
from pathlib import Path

SEED = 20190527
N = 20

FIRST = ["Orsolya", "Tomasz", "Ingrid", "Rafael", "Zoë", "Henrik", "Mireille", "Kasimir", "Leontyne",
         "Gudrun", "Ptolemy", "Sunniva", "Viktor", "Rosalind", "Emeric", "Wilhelmina", "Teodor", "Marisol"]
LAST = ["Brandt", "Okonkwo", "Varga", "Lindqvist", "Marchetti", "Szabo", "Delacroix", "Ruiz", "Fenwick",
        "Halloran", "Kowalczyk", "Thorsen", "Pereira", "Ostrowski", "Quennell", "Yablonsky"]
TOWNS = ["Kestrel Bay", "Marrowgate", "Port Elsin", "Thistlewick", "Lowmere", "Rookhaven", "Silverholm",
         "Wyndcombe", "Fernhollow", "Stonebridge Cross", "Greyling", "Holloway Sands"]
CASTLES = ["Castle Dunmere", "Castle Ravensworth", "Castle Tiernan", "Castle Morven", "Castle Glenhallow",
           "Castle Ostwick", "Castle Penrhyn", "Castle Wexcombe"]
NOVELS = ["The Glass Orchard", "The Salt Cartographer", "The Lantern Keeper", "The Winter Ledger",
          "The Copper Meridian", "The Quiet Harbour", "The Paper Falcon", "The Iron Almanac"]
FESTIVALS = ["Lantern Regatta", "Harvest Moon Fair", "Kite Parade", "Midsummer Bell Race", "Oyster Carnival",
             "Copperleaf Gathering", "Tall Ships Pageant", "Juniper Night Market"]
RIVERS = ["Oster Water", "Kelvane", "Brennock Stream", "Yarrow Run", "Melloch Water", "Sulvey", "Tarrant Flow",
          "Glimmerburn"]
PRIZES = ["Silver Quill", "Northern Lamp", "Golden Heron", "Blue Thistle", "Crimson Ledger", "Evergreen Pen",
          "Harbour Light", "Amber Compass"]
DISTRACTORS = ["Abbeville Moor", "Ardent Hollow", "Ashcombe Fell", "Aldergrove Heath", "Barrowmead",
               "Bellhaven Down", "Brackenridge", "Calderwick", "Cobham Reach", "Amberley Vale",
               "Braeside Fold", "Caddon Ness"]
NATIONALITIES = ["Hungarian", "Polish", "Norwegian", "Chilean", "Italian", "Danish", "Portuguese", "Scottish"]
PROFESSIONS = ["sculptor", "engineer", "architect", "novelist", "painter", "cartographer", "botanist", "composer"]
REGIONS = ["northern", "western", "eastern", "southern", "upland", "coastal"]
TRADES = ["sheep farming", "peat cutting", "slate quarrying", "boat building", "wool weaving", "cider making"]


def tokens(text):
    """Normalized tokens, as used by the lexical reference model."""
    text = text.lower()
    text = "".join(ch for ch in text if ch not in set(string.punctuation))
    text = re.sub(r"\b(a|an|the)\b", " ", text)
    return text.split()


def distractor(rng, title):
    return [title, [
        f"{title} is a hamlet in the {rng.choice(REGIONS)} uplands.",
        f"Its economy relies mostly on {rng.choice(TRADES)}.",
        f"Some {rng.randint(120, 4800)} people lived there according to one census.",
    ]]


def festival_item(rng, person, town, answer):
    year = rng.randint(1901, 1989)
    question = f"Which annual festival is held in the town where {person} was born?"
    bridge = f"{person} was born in {town}, a small settlement near the coast, in {year}."
    answer_sentence = f"The annual {answer} festival is held in the town every spring."
    second = [f"{town} is a port town on a tidal estuary.",
              f"Fishing boats still use its narrow harbour.", answer_sentence]
    return question, bridge, town, second, 2


def river_item(rng, person, castle, answer):
    question = f"Which river flows past the castle that {person} designed?"
    bridge = f"{person} designed {castle} while working for a northern duke."
    answer_sentence = f"The river {answer} flows past the castle walls."
    second = [f"{castle} is a fortified house built from grey stone.", answer_sentence,
              "Its gardens were opened to visitors after restoration."]
    return question, bridge, castle, second, 1


def prize_item(rng, person, novel, answer):
    question = f"What prize was awarded to the novel written by {person}?"
    bridge = f"{person} wrote {novel} during a long winter spent abroad."
    answer_sentence = f"The novel was awarded the {answer} Prize in {rng.randint(1950, 2015)}."
    second = [f"{novel} is a book about memory and migration.", answer_sentence]
    return question, bridge, novel, second, 1


def build(rng):
    firsts, lasts = FIRST[:], LAST[:]
    rng.shuffle(firsts)
    rng.shuffle(lasts)
    pools = {"festival": (TOWNS[:], FESTIVALS[:]), "river": (CASTLES[:], RIVERS[:]),
             "prize": (NOVELS[:], PRIZES[:])}
    for bridges, answers in pools.values():
        rng.shuffle(bridges)
        rng.shuffle(answers)
    makers = {"festival": festival_item, "river": river_item, "prize": prize_item}
    kinds = ["festival", "river", "prize"]
    used = {k: 0 for k in kinds}
    records = []
    distractors = DISTRACTORS[:]
    for i in range(N):
        kind = kinds[i % 3]
        bridges, answers = pools[kind]
        j = used[kind]
        used[kind] += 1
        person = f"{firsts[i % len(firsts)]} {lasts[i % len(lasts)]}"
        bridge_title = bridges[j % len(bridges)]
        answer = answers[j % len(answers)]
        question, bridge, title, second, answer_idx = makers[kind](rng, person, bridge_title, answer)
        last_name = person.split()[1]
        nationality = rng.choice(NATIONALITIES)
        article = "an" if nationality[0] in "AEIOU" else "a"
        first_article = [person, [
            f"{person} works as {article} {nationality} {rng.choice(PROFESSIONS)}.",
            bridge,
            f"{last_name} later taught at a technical college.",
        ]]
        d1, d2 = rng.sample(distractors, 2)
        context = [first_article, [title, second], distractor(rng, d1), distractor(rng, d2)]
        rng.shuffle(context)
        records.append({
            "_id": f"fx{i:02d}{rng.getrandbits(24):06x}",
            "question": question,
            "answer": answer,
            "type": "bridge",
            "level": rng.choice(["easy", "medium", "hard"]),
            "supporting_facts": [[person, 1], [title, answer_idx]],
            "context": context,
        })
    return records


def check(records):
    for rec in records:
        titles = [a[0] for a in rec["context"]]
        assert len(set(titles)) == len(titles), rec["_id"]
        first = min(titles)
        assert first in DISTRACTORS, (rec["_id"], first)
        q = tokens(rec["question"])
        assert q[0] not in {"is", "are", "was", "were", "does", "do", "did"}
        reversed_q = {t[::-1] for t in q}
        for _, sents in rec["context"]:
            for s in sents:
                assert not reversed_q & set(tokens(s)), (rec["_id"], s)
        assert tokens(rec["answer"]), rec["_id"]


def predictions(rng, records):
    """Varied predictions exercising every scoring branch."""
    answer, sp = {}, {}
    for i, rec in enumerate(records):
        rid, gold, facts = rec["_id"], rec["answer"], rec["supporting_facts"]
        all_facts = [[a[0], j] for a in rec["context"] for j in range(len(a[1]))]
        wrong = [f for f in all_facts if f not in facts]
        case = i % 10
        if case == 0:
            answer[rid], sp[rid] = gold, facts
        elif case == 1:
            answer[rid] = f"  THE {gold.upper()}!! "
            sp[rid] = facts + [rng.choice(wrong)]
        elif case == 2:
            answer[rid] = gold.split()[0]
            sp[rid] = facts[:1]
        elif case == 3:
            answer[rid] = "yes"
            sp[rid] = [rng.choice(wrong)]
        elif case == 4:
            answer[rid] = "noanswer"
            sp[rid] = facts
        elif case == 5:
            sp[rid] = facts  # answer missing
        elif case == 6:
            answer[rid] = gold  # sp missing
        elif case == 7:
            answer[rid], sp[rid] = "", []
        elif case == 8:
            answer[rid] = f"the annual {gold} festival, an event"
            sp[rid] = rng.sample(wrong, 2)
        else:
            answer[rid] = f"a {gold.lower()} an {gold.split()[-1]}"
            sp[rid] = facts[1:] + rng.sample(wrong, 3)
    return {"answer": answer, "sp": sp}


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    records = build(rng)
    check(records)
    dump = lambda obj, name: (out / name).write_text(json.dumps(obj, indent=1, ensure_ascii=False) + "\n",
                                                     encoding="utf-8")
    dump(records, "fixture20.json")
    dump(records[:5], "micro5.json")
    dump(predictions(rng, records), "fixture20_pred.json")


if __name__ == "__main__":
    main()
