#!/usr/bin/env python3
"""Regenerates the data/ fixtures (policies, caller lists, scenario suites,
and the synthetic clustering corpus). Deterministic: rerunning produces
byte-identical files."""

import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "data"

FILLER = (
    "attention valued customer this is an important message regarding your "
    "account records indicate an urgent matter that requires immediate review "
    "please stay on the line while we connect you with a licensed specialist "
    "who can walk you through the available options today this offer expires "
    "soon so act now to avoid losing eligibility thank you for your patience "
    "and understanding goodbye"
).split()


def pitch_words(rng, n, extra=()):
    words = []
    while len(words) < n:
        words.extend(FILLER)
    words = words[:n]
    for i, w in enumerate(extra):
        words[3 + 2 * i] = w
    return " ".join(words)


def utter(text, offset, rate=2.5):
    return {"text": text, "offset_s": offset, "rate_wps": rate}


def scenario(sid, caller, script, expected, basis=None, reactive=False):
    sc = {
        "id": sid,
        "caller_id": caller,
        "reactive": reactive,
        "script": script,
        "expected": expected,
    }
    if basis:
        sc["expected_label_basis"] = basis
    return sc


def dump(path, obj):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def gen_policies():
    write(
        DATA / "policy.cfg",
        "# screening policy used by the shipped scenario suites\n"
        "names = taylor\n"
        "t1 = 20\n"
        "t2 = 35\n"
        "t3 = 5\n"
        "grace = 10\n"
        "lists = lists.txt\n"
        "miss_probability = 0.0\n"
        "seed = 1\n",
    )
    write(
        DATA / "policy_miss.cfg",
        "# same policy with a flaky name detector (callers must repeat)\n"
        "names = taylor\n"
        "t1 = 20\n"
        "t2 = 35\n"
        "t3 = 5\n"
        "grace = 10\n"
        "lists = lists.txt\n"
        "miss_probability = 0.5\n"
        "seed = 6\n",
    )
    write(
        DATA / "lists.txt",
        "# W = user whitelist, G = global whitelist, B = blacklist\n"
        "W 4155550001\n"
        "W 4155550002\n"
        "G 2025550001\n"
        "B 9005550001\n"
        "B 9005550002\n",
    )
    write(
        DATA / "stopwords.txt",
        "\n".join(
            (
                "a an and are as at be been but by for from had has have if in is "
                "it its of on or that the this to was we were will with you your "
                "i me my our us they them their he she his her do does did not no "
                "yes so then than there here what who whom when where why how all "
                "any more most other some such only own same s t can just don now"
            ).split()
        )
        + "\n",
    )


def gen_robocalls_50():
    rng = random.Random(7)
    scenarios = []
    for i in range(30):  # long pitches, talk through the interruption
        text = pitch_words(rng, 75)
        scenarios.append(
            scenario(
                f"rb-long-{i:02d}",
                f"800555{i:04d}",
                [utter(text, 0.0)],
                "blocked_robocall",
                "silence_rule",
            )
        )
    for i in range(10):  # short keypad pitches
        text = pitch_words(rng, 30, extra=("press", "5"))
        scenarios.append(
            scenario(
                f"rb-press-{i:02d}",
                f"800556{i:04d}",
                [utter(text, 0.0)],
                "blocked_robocall",
                "keyword_override",
            )
        )
    for i in range(10):  # short pitches without keypad keywords
        text = pitch_words(rng, 30)
        scenarios.append(
            scenario(
                f"rb-short-{i:02d}",
                f"800557{i:04d}",
                [utter(text, 0.0)],
                "blocked_human",
                "silence_rule",
            )
        )
    dump(DATA / "scenarios" / "robocalls_50.json", {"scenarios": scenarios})


def gen_labeling_100():
    rng = random.Random(11)
    scenarios = []
    for i in range(70):
        text = pitch_words(rng, 75)
        scenarios.append(
            scenario(
                f"lb-long-{i:02d}",
                f"801555{i:04d}",
                [utter(text, 0.0)],
                "blocked_robocall",
                "silence_rule",
            )
        )
    for i in range(20):
        kw = ("press", "1") if i % 2 == 0 else ("enter", "your", "zip")
        text = pitch_words(rng, 30, extra=kw)
        scenarios.append(
            scenario(
                f"lb-press-{i:02d}",
                f"801556{i:04d}",
                [utter(text, 0.0)],
                "blocked_robocall",
                "keyword_override",
            )
        )
    for i in range(10):
        text = pitch_words(rng, 30)
        scenarios.append(
            scenario(
                f"lb-short-{i:02d}",
                f"801557{i:04d}",
                [utter(text, 0.0)],
                "blocked_human",
                "silence_rule",
            )
        )
    dump(DATA / "scenarios" / "labeling_100.json", {"scenarios": scenarios})


def gen_forwarding():
    scenarios = []
    offsets = [2.0, 6.0, 15.0, 30.0]
    n = 0
    for off in offsets:
        for _ in range(5):
            scenarios.append(
                scenario(
                    f"fw-{n:02d}-at{int(off):02d}",
                    f"415777{n:04d}",
                    [utter("taylor", off)],
                    "forwarded",
                )
            )
            n += 1
    dump(DATA / "scenarios" / "forwarding_20.json", {"scenarios": scenarios})

    repeat = []
    for i in range(20):
        script = [utter("taylor", 2.0 + 8.0 * j) for j in range(5)]
        repeat.append(
            scenario(f"fwr-{i:02d}", f"415778{i:04d}", script, "forwarded")
        )
    dump(DATA / "scenarios" / "forwarding_repeat_20.json", {"scenarios": repeat})


def gen_demo():
    scenarios = [
        scenario(
            "demo-whitelist",
            "4155550001",
            [utter("hey its me calling about dinner", 0.0)],
            "whitelist_pass",
        ),
        scenario(
            "demo-blacklist",
            "9005550001",
            [utter("you have won a cruise", 0.0)],
            "blacklist_drop",
        ),
        scenario(
            "demo-friend",
            "3125550188",
            [utter("hello can you please forward my call to taylor", 6.0)],
            "forwarded",
        ),
        scenario(
            "demo-telemarketer",
            "3125550199",
            [
                utter("hello can you please forward my call to robert", 6.0),
                utter("we met at a seminar today", 13.0),
                utter("i just wanted to follow up about the seminar", 21.0),
                utter("maybe another time then", 26.0),
            ],
            "blocked_human",
            "silence_rule",
            reactive=True,
        ),
        scenario(
            "demo-robocall",
            "8005550123",
            [utter(pitch_words(random.Random(3), 75), 0.0)],
            "blocked_robocall",
            "silence_rule",
        ),
        scenario(
            "demo-short-robocall",
            "8005550124",
            [utter(pitch_words(random.Random(4), 30, extra=("press", "1")), 0.0)],
            "blocked_robocall",
            "keyword_override",
        ),
    ]
    dump(DATA / "scenarios" / "demo.json", {"scenarios": scenarios})


# Each campaign reuses a fixed core pitch plus one campaign-specific
# variation per paraphrase, so transcripts cluster by campaign vocabulary.
CAMPAIGNS = {
    "warranty": {
        "core": (
            "the factory warranty on your vehicle has expired our records "
            "show your car is no longer covered extend the auto protection "
            "plan now to avoid paying for costly engine and transmission "
            "repairs out of pocket"
        ),
        "variants": [
            "bumper to bumper coverage is still available for your car",
            "ask about roadside assistance and free towing for your vehicle",
            "a certified mechanic reviews every covered repair claim",
            "your dealership warranty lapsed at sixty thousand miles",
            "renewing costs less than one major transmission repair",
            "coverage includes parts labor and rental car reimbursement",
            "your odometer reading still qualifies for the extended plan",
            "the service contract protects the engine and the drivetrain",
            "act before your vehicle becomes ineligible for coverage",
            "speak with a warranty specialist about your car today",
        ],
    },
    "taxdebt": {
        "core": (
            "this is the taxpayer resolution unit regarding back taxes owed "
            "to the internal revenue service a lien may be filed against "
            "your property press one to speak with an agent about settling "
            "your tax debt"
        ),
        "variants": [
            "wage garnishment begins unless the balance is resolved",
            "penalties and interest accrue on the unpaid tax balance",
            "the fresh start settlement program can reduce what you owe",
            "an enforcement action was opened under your tax file",
            "ignoring this notice may result in asset seizure",
            "our tax advocates negotiate directly with the revenue office",
            "your refund was applied but a balance remains outstanding",
            "a certified letter about the lien was returned undelivered",
            "the audit division escalated your delinquent account",
            "resolve the debt before the collection deadline expires",
        ],
    },
    "insurance": {
        "core": (
            "open enrollment for discounted health insurance plans ends this "
            "week qualified applicants receive medical dental and vision "
            "benefits at reduced monthly premiums speak with a licensed "
            "benefits advisor"
        ),
        "variants": [
            "bronze silver and gold tier plans are still available",
            "preexisting conditions are accepted under the new plans",
            "compare deductibles and copays across every network",
            "prescription drug coverage is included at no extra premium",
            "families of four save hundreds on monthly premiums",
            "short term medical plans start as low as two dollars a day",
            "telehealth visits are unlimited under the enhanced benefits",
            "your employer plan may cost more than the marketplace rate",
            "supplemental dental and vision riders can be added today",
            "subsidies may cover most of your monthly premium",
        ],
    },
    "cruise": {
        "core": (
            "congratulations you have been selected to receive a free cruise "
            "vacation package for two claim your tickets to the bahamas with "
            "meals and onboard entertainment included this prize expires "
            "tonight"
        ),
        "variants": [
            "the itinerary sails from miami to nassau and back",
            "upgrade to an ocean view cabin for a small fee",
            "the casino and the buffet are open around the clock",
            "winners also receive a complimentary island excursion",
            "your boarding passes are being held at the dock office",
            "this getaway includes a private beach day on the island",
            "a deposit is not required to reserve the sailing date",
            "the promotional voyage departs every friday this season",
            "bring a companion and the second ticket is free",
            "redeem the voucher before the departure window closes",
        ],
    },
    "studentloan": {
        "core": (
            "important news about your student loan balance new forgiveness "
            "programs may erase your federal student loan payments if you "
            "qualify under the latest relief guidelines enrollment closes "
            "soon"
        ),
        "variants": [
            "graduates with public service jobs qualify for full discharge",
            "consolidate multiple loans into one lower monthly payment",
            "income driven repayment can cap what you pay each month",
            "defaulted borrowers can rehabilitate their loans this term",
            "the interest pause ends so lock in forgiveness now",
            "private loans may be refinanced at a lower fixed rate",
            "your servicer reported an eligible outstanding balance",
            "documentation takes only minutes over the phone",
            "past payments may count retroactively toward forgiveness",
            "borrowers in good standing receive priority processing",
        ],
    },
}

MISDIALS = [
    "hey grandma its marcus just checking in about sunday lunch love you bye",
    "hi its dana from the book club we moved the meeting to thursday evening",
    "uh sorry wrong number i was trying to reach the pizza place on fifth",
    "coach here practice is rained out tomorrow bring cleats on saturday instead",
    "hi honey the dentist moved your appointment to nine thirty friday morning",
    "hola tia soy miguel llamame cuando puedas sobre la fiesta del sabado",
    "hey man the fantasy draft got pushed to eight dont forget your laptop",
]


def gen_corpus():
    corpus = DATA / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    for name, spec in sorted(CAMPAIGNS.items()):
        for i, variant in enumerate(spec["variants"]):
            text = f"{spec['core']} {variant}"
            write(corpus / f"{name}-{i:02d}.txt", text + "\n")
    for i, text in enumerate(MISDIALS):
        write(corpus / f"misdial-{i}.txt", text + "\n")


def main():
    gen_policies()
    gen_robocalls_50()
    gen_labeling_100()
    gen_forwarding()
    gen_demo()
    gen_corpus()
    print(f"fixtures written under {DATA}")


if __name__ == "__main__":
    main()
