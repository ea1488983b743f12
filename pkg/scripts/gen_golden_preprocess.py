"""Generate the golden preprocessing fixtures in tests/golden/.

The cleaned outputs come from the reference stage implementations in
tests/oracles.py (loop-based, independent of the package).  Review the
outputs by hand before committing: they are the frozen contract.

Run from the repo root:  python scripts/gen_golden_preprocess.py
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

import oracles  # noqa: E402

RAW_TWEETS = [
    "@USER Covid cases rise again HTTPURL",
    "@USER @USER stay safe out there",
    "Breaking: 1,200 new cases confirmed in the city #covid19 HTTPURL",
    "soooooo bored of lockdown",
    "gooood news everyone \U0001F600",
    "#StayHome #StaySafe wash your hands",
    "deaths reached 300 today... HTTPURL",
    "I tested positive \U0001F637 please be careful",
    "my cat is doing parkour again \U0001F431\U0001F431",
    "YESSSSS finally vaccinated \U0001F489",
    "@USER thanks for the update HTTPURL HTTPURL",
    "Hospital ICU at 98% capacity #healthcare",
    "quarantine day 47: talking to plants",
    "WHO reports new variant detected HTTPURL",
    "no new deaths reported this week \U0001F64F",
    "lol this zoom meeting \U0001F602\U0001F602\U0001F602",
    "THE THE the economy is down",
    "running out of masks, stores empty",
    "viruses mutate; that's what they do",
    "the bosses closed all their businesses",
    "flies spread no viruses, relax",
    "confirmed: 12 recovered, 3 critical",
    "stay home ❤️ stay safe",
    "@USER@USER spam mention glitch",
    "HTTPURLHTTPURL doubled link token",
    "weird   spacing    everywhere",
    "tabs are impossible but newlines too",
    "ALL CAPS PANIC BUYING AGAIN",
    "café reopened with distancing",
    "counting: one, two, three, 4, 5",
    "underscore_token and covid-19 mix",
    "!!!???...",
    "@USER",
    "HTTPURL",
    "#",
    "\U0001F600",
    "positive for covid, isolating now",
    "she's been coughing for daysss",
    "masks? masks!! masks...",
    "schools closing statewide Monday HTTPURL #education",
    "2020 has been quite a year",
    "testing testing 123 \U0001F3A4",
    "new testing sites opened downtown",
    "borders closed until further notice",
    "groceries delivered \U0001F69A thanks driver",
    "mild symptoms, monitoring at home",
    "herd immunity debate continues HTTPURL",
    "vaccine trials phase 3 results promising \U0001F9EA",
    "curfew starts at 9pm tonight",
    "goodbye 2020 \U0001F44B\U0001F3FD you were a lot",
]

STAGES = list(oracles.REF_STAGES)


def main() -> None:
    assert len(RAW_TWEETS) == 50, len(RAW_TWEETS)
    out_dir = ROOT / "tests" / "golden"
    out_dir.mkdir(parents=True, exist_ok=True)

    raw_lines = [f"g{i:02d}\t{text}" for i, text in enumerate(RAW_TWEETS)]
    (out_dir / "raw.tsv").write_text("".join(l + "\n" for l in raw_lines), encoding="utf-8")

    op_lines = [
        f"g{i:02d}\t{oracles.ref_apply_pipeline(oracles.OP_STAGE_ORDER, text)}"
        for i, text in enumerate(RAW_TWEETS)
    ]
    (out_dir / "op.tsv").write_text("".join(l + "\n" for l in op_lines), encoding="utf-8")

    for name in STAGES:
        fn = oracles.REF_STAGES[name]
        lines = [f"g{i:02d}\t{fn(text)}" for i, text in enumerate(RAW_TWEETS)]
        (out_dir / f"stage_{name}.tsv").write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    print(f"wrote goldens for {len(STAGES)} stages + op to {out_dir}")


if __name__ == "__main__":
    main()
