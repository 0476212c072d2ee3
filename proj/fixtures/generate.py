#!/usr/bin/env python3
"""Writes the synthetic Marathi/Hindi fixture set used by tests and the demo
experiment matrix. Output is deterministic for a given seed."""

import argparse
import random
import unicodedata
from pathlib import Path

# Marathi fuses case markers into the noun; Hindi uses separate postpositions.
CASES = {
    "loc": ("ात", "त", "में"),
    "gen": ("ाच्या", "च्या", "के"),
    "dat": ("ाला", "ला", "को"),
    "on": ("ावर", "वर", "पर"),
    "abl": ("ाहून", "हून", "से"),
}

SUBJECTS = [
    ("राम", "राम"), ("सीता", "सीता"), ("तो", "वह"), ("मोहन", "मोहन"),
    ("गीता", "गीता"), ("मुलगा", "लड़का"), ("शिक्षिका", "शिक्षिका"), ("आई", "माँ"),
    ("बाबा", "पिता"), ("रमेश", "रमेश"),
]

PLACES = [
    ("घर", "घर"), ("नगर", "नगर"), ("मंदिर", "मंदिर"), ("बाजार", "बाजार"),
    ("शहर", "शहर"), ("गाव", "गाँव"), ("देश", "देश"), ("डोंगर", "पहाड़"),
    ("समुद्र", "समुद्र"), ("जंगल", "जंगल"), ("शेत", "खेत"), ("महाल", "महल"),
    ("वर्ग", "कक्षा"), ("पर्वत", "पर्वत"), ("तलाव", "तालाब"), ("बाग", "बगीचा"),
    ("कार्यालय", "दफ़्तर"), ("विद्यालय", "विद्यालय"), ("रुग्णालय", "अस्पताल"),
    ("आश्रम", "आश्रम"),
]

PERSONS = [
    ("मित्र", "दोस्त"), ("शिक्षक", "शिक्षक"), ("लेखक", "लेखक"),
    ("डॉक्टर", "डॉक्टर"), ("सेवक", "सेवक"), ("गायक", "गायक"),
]

OBJECTS = [
    ("पुस्तक", "किताब"), ("पत्र", "पत्र"), ("फूल", "फूल"), ("फळ", "फल"),
    ("कागद", "कागज़"), ("चित्र", "चित्र"), ("पैसे", "पैसे"), ("दूध", "दूध"),
    ("पाणी", "पानी"), ("भाजी", "सब्ज़ी"),
]

VERBS = {
    "loc": [("जातो", "जाता है"), ("राहतो", "रहता है"), ("बसतो", "बैठता है"),
            ("फिरतो", "घूमता है"), ("काम करतो", "काम करता है"), ("खेळतो", "खेलता है"),
            ("थांबतो", "रुकता है")],
    "abl": [("येतो", "आता है"), ("निघतो", "निकलता है"), ("परततो", "लौटता है")],
    "on": [("चढतो", "चढ़ता है"), ("बसतो", "बैठता है"), ("थांबतो", "रुकता है")],
    "dat": [("देतो", "देता है"), ("पाठवतो", "भेजता है"), ("दाखवतो", "दिखाता है")],
    "tr": [("पाहतो", "देखता है"), ("वाचतो", "पढ़ता है"), ("आणतो", "लाता है"),
           ("ठेवतो", "रखता है"), ("घेतो", "लेता है")],
    "home": [("जाई", "जाता था"), ("येई", "आता था")],
}

# Hindi -> Marathi. The first row is the anger synset example.
SYNSETS = [
    ("गुस्सा करना", ["चिडणे", "संतापणे", "भडकणे", "कोपणे", "चिरडणे"]),
    ("पेड़", ["झाड", "वृक्ष", "तरू"]),
    ("नदी", ["नदी", "सरिता"]),
    ("सूरज", ["सूर्य", "रवी"]),
    ("चाँद", ["चंद्र"]),
    ("हाथी", ["हत्ती", "गज"]),
    ("घोड़ा", ["घोडा", "अश्व"]),
    ("कमल", ["कमळ"]),
    ("बादल", ["ढग", "मेघ"]),
    ("पंछी", ["पक्षी"]),
    ("कपड़ा", ["कापड", "वस्त्र"]),
    ("मछली", ["मासा"]),
    ("दीपक", ["दिवा", "दीप"]),
    ("गाय", ["गाय", "धेनू"]),
    ("सोना", ["सोने", "सुवर्ण"]),
]

KRIDANTA = [
    ("खाकर", "खाऊन"), ("पीकर", "पिऊन"), ("देखकर", "पाहून"), ("जाकर", "जाऊन"),
    ("आकर", "येऊन"), ("पढ़कर", "वाचून"), ("सुनकर", "ऐकून"), ("बैठकर", "बसून"),
    ("लिखकर", "लिहून"), ("उठकर", "उठून"), ("सोकर", "झोपून"), ("नहाकर", "आंघोळ करून"),
]

FUNCTION_WORDS = [
    ("हमेशा", "नेहमी"), ("जल्दी", "लवकर"), ("धीरे", "हळू"), ("कल", "उद्या"),
    ("फिर", "मग"), ("भी", "सुद्धा"), ("यहाँ", "इथे"), ("वहाँ", "तिथे"),
]

CONJUNCTIONS = [("और", "आणि")]

VERB_PHRASES = [
    ("दर्शन के समय", "दर्शनाच्या वेळी"),
    ("जाने वालों के साथ", "जाणाऱ्यांबरोबर"),
    ("खाने के बाद", "खाल्ल्यानंतर"),
    ("जाने से पहले", "जाण्यापूर्वी"),
    ("पढ़ने के लिए", "वाचण्यासाठी"),
    ("काम करते समय", "काम करताना"),
    ("खेलने के बाद", "खेळल्यानंतर"),
    ("सोने से पहले", "झोपण्यापूर्वी"),
    ("आने के बाद", "आल्यानंतर"),
    ("देखने के लिए", "पाहण्यासाठी"),
    ("पूजा करने के लिए", "पूजा करण्यासाठी"),
    ("घूमने के लिए", "फिरण्यासाठी"),
    ("मिलने के लिए", "भेटण्यासाठी"),
    ("नहाने के बाद", "आंघोळीनंतर"),
    ("लौटते समय", "परतताना"),
]

RULES = [
    ("suffix", "ांमध्ये", "मध्ये", 1),
    ("suffix", "िलेली", "लेली", 1),
    ("suffix", "ाच्या", "च्या", 1),
    ("suffix", "ंच्या", "च्या", 1),
    ("suffix", "ाहून", "हून", 1),
    ("suffix", "ावर", "वर", 1),
    ("suffix", "ाला", "ला", 1),
    ("suffix", "ात", "त", 2),
    ("exact", "नगरी", "नगर ई", 1),
    ("exact", "आहेत", "अस", 1),
]

SPLIT_SOURCE = ("ही सात धर्मस्थळे सात नगरी वा सप्तपुरींच्या रूपात ग्रंथांमध्ये "
                      "वर्णिलेली आहेत.")
SPLIT_EXPECTED = ("ही सात धर्मस्थळे सात नगर ई वा सप्तपुरी च्या रूप त ग्रंथ मध्ये "
                        "वर्ण लेली अस .")
CLEAN_MR = ("जेवणात जास्त मिरची-मसाले व आम्लीय रसांपासून बनवलेल्या खाद्यपदार्थांचे "
                  "सेवन केल्याने शरीरात आम्लता जास्त वाढते .")
CLEAN_HI = ("भोजन में अधिक मिरच-मसालों व अम्लीय रसों से बने खाद्य पदार्थों का सेवन "
                  "करने से शरीर में अम्लता अधिक बढ़ती है ।")
UNK_MR = "तो घरी जाणाऱ्यांबरोबर जाई ."
UNK_HI = "वह घर |UNK| जाता ।"


def nfc(text):
    return unicodedata.normalize("NFC", text)


def split_token(token):
    exact = {r[1]: r[2] for r in RULES if r[0] == "exact"}
    if token in exact:
        return exact[token].split()
    rules = sorted((r for r in RULES if r[0] == "suffix"), key=lambda r: -len(r[1]))
    for _, suffix, emit, min_stem in rules:
        if token.endswith(suffix) and token != suffix:
            stem = token[: -len(suffix)]
            if len(stem) < min_stem:
                return [token]
            return [stem] + emit.split()
    return [token]


def inflect(stem, case):
    return stem + CASES[case][0]


class Generator:
    def __init__(self, seed):
        self.rng = random.Random(seed)
        # Each (noun, case) combination is either seen in training or held out
        # for tune/test, so unsplit models meet unknown inflected forms.
        self.seen = {}
        for stem, _ in PLACES + PERSONS:
            for case in CASES:
                self.seen[(stem, case)] = self.rng.random() < 0.55
        for stem, _ in PLACES + PERSONS:
            # Every stem appears in training with at least one case.
            if not any(self.seen[(stem, c)] for c in CASES):
                self.seen[(stem, "loc")] = True

    def pick(self, items):
        return self.rng.choice(items)

    def noun_form(self, pool, case, held_out):
        candidates = [n for n in pool if self.seen[(n[0], case)] != held_out]
        if not candidates:
            candidates = pool
        mr, hi = self.pick(candidates)
        return [inflect(mr, case)], [hi, CASES[case][2]]

    def base(self, held_out=False):
        s_mr, s_hi = self.pick(SUBJECTS)
        template = self.pick("AABBCDDEFFGH")
        mr, hi = [s_mr], [s_hi]
        if template == "A":
            a, b = self.noun_form(PLACES, "loc", held_out)
            v = self.pick(VERBS["loc"])
        elif template == "B":
            a, b = self.noun_form(PLACES, "abl", held_out)
            v = self.pick(VERBS["abl"])
        elif template == "C":
            a, b = self.noun_form(PLACES, "on", held_out)
            v = self.pick(VERBS["on"])
        elif template == "D":
            a, b = self.noun_form(PERSONS, "dat", held_out)
            o = self.pick(OBJECTS)
            a, b = a + [o[0]], b + [o[1]]
            v = self.pick(VERBS["dat"])
        elif template == "E":
            a1, b1 = self.noun_form(PERSONS + PLACES, "gen", held_out)
            a2, b2 = self.noun_form(PLACES, "loc", False)
            a, b = a1 + a2, b1 + b2
            v = self.pick(VERBS["loc"])
        elif template == "F":
            o = self.pick(OBJECTS)
            a, b = [o[0]], [o[1]]
            v = self.pick(VERBS["tr"])
        elif template == "G":
            a1, b1 = self.noun_form(PERSONS, "gen", held_out)
            o = self.pick(OBJECTS)
            a, b = a1 + [o[0]], b1 + [o[1]]
            v = self.pick(VERBS["tr"])
        else:
            a, b = ["घरी"], ["घर"]
            v = self.pick(VERBS["home"])
        return mr + a + v[0].split() + ["."], hi + b + v[1].split() + ["।"]

    def synset_sentence(self):
        s_mr, s_hi = self.pick(SUBJECTS)
        hi_word, mr_words = self.pick(SYNSETS[1:])
        v = self.pick(VERBS["tr"])
        return ([s_mr, self.pick(mr_words)] + v[0].split() + ["."],
                [s_hi] + hi_word.split() + v[1].split() + ["।"])

    def function_sentence(self):
        s_mr, s_hi = self.pick(SUBJECTS)
        a, b = self.noun_form(PLACES, "loc", False)
        v = self.pick(VERBS["loc"])
        kind = self.rng.randrange(3)
        if kind == 0:
            hi_k, mr_k = self.pick(KRIDANTA)
            return ([s_mr] + mr_k.split() + a + v[0].split() + ["."],
                    [s_hi] + hi_k.split() + b + v[1].split() + ["।"])
        if kind == 1:
            hi_f, mr_f = self.pick(FUNCTION_WORDS)
            return ([s_mr, mr_f] + a + v[0].split() + ["."],
                    [s_hi, hi_f] + b + v[1].split() + ["।"])
        t_mr, t_hi = self.pick([s for s in SUBJECTS if s[0] != s_mr])
        hi_c, mr_c = CONJUNCTIONS[0]
        return ([s_mr, mr_c, t_mr] + a + v[0].split() + ["."],
                [s_hi, hi_c, t_hi] + b + v[1].split() + ["।"])

    def verb_phrase_sentence(self):
        s_mr, s_hi = self.pick(SUBJECTS)
        hi_vp, mr_vp = self.pick(VERB_PHRASES)
        a, b = self.noun_form(PLACES, "loc", False)
        v = self.pick(VERBS["loc"])
        return ([s_mr] + mr_vp.split() + a + v[0].split() + ["."],
                [s_hi] + hi_vp.split() + b + v[1].split() + ["।"])

    def mixed_sentence(self):
        s_mr, s_hi = self.pick(SUBJECTS)
        hi_k, mr_k = self.pick(KRIDANTA)
        hi_vp, mr_vp = self.pick(VERB_PHRASES)
        hi_word, mr_words = self.pick(SYNSETS[1:])
        v = self.pick(VERBS["tr"])
        return ([s_mr] + mr_vp.split() + mr_k.split() + [self.pick(mr_words)] + v[0].split()
                + ["."],
                [s_hi] + hi_vp.split() + hi_k.split() + hi_word.split() + v[1].split() + ["।"])

    def evaluation_set(self, size, exclude):
        out = []
        seen = set(exclude)
        makers = ([lambda: self.base(held_out=True)] * 3 + [self.base] * 1 +
                  [self.synset_sentence] * 2 + [self.function_sentence] * 2 +
                  [self.verb_phrase_sentence] * 2 + [self.mixed_sentence])
        attempts = 0
        while len(out) < size:
            attempts += 1
            if attempts > 100000:
                raise RuntimeError("cannot draw enough distinct sentences")
            pair = makers[len(out) % len(makers)]()
            key = " ".join(pair[0])
            if key in seen:
                continue
            seen.add(key)
            out.append(pair)
        return out


def write_lines(path, lines):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(nfc(line) + "\n" for line in lines), encoding="utf-8")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=2018)
    parser.add_argument("--out", type=Path, default=Path(__file__).resolve().parent)
    parser.add_argument("--train", type=int, default=600)
    parser.add_argument("--tune", type=int, default=500)
    parser.add_argument("--test", type=int, default=80)
    args = parser.parse_args()
    gen = Generator(args.seed)
    out = args.out

    # Clean training pairs, split over two origins: tourism and health.
    clean_pairs = []
    keys = set()
    while len(clean_pairs) < args.train:
        mr, hi = gen.base(held_out=False)
        key = " ".join(mr)
        if key in keys and gen.rng.random() < 0.8:
            continue
        keys.add(key)
        clean_pairs.append((mr, hi))

    # Noise for the uncleaned baseline. Each entry is [mr, hi, fixed_hi]; a
    # fixed_hi value becomes a patch once positions are final.
    pairs = [[" ".join(m), " ".join(h), None] for m, h in clean_pairs]
    for block_start, block_len in ((60, 40), (220, 40), (400, 40)):
        block = [list(p) for p in pairs[block_start:block_start + block_len]]
        for i in range(block_len):
            pairs[block_start + i] = [block[i][0], block[(i + 1) % block_len][1], block[i][1]]
    # The cleaning example arrives with a wrong Hindi side.
    pairs.insert(300, [CLEAN_MR, pairs[299][1], CLEAN_HI])

    junk = []
    for _ in range(6):
        mr, _ = gen.pick(clean_pairs)
        junk.append([" ".join(mr), "", None])
    for _ in range(3):
        mr = sum((gen.pick(clean_pairs)[0] for _ in range(18)), [])
        hi = sum((gen.pick(clean_pairs)[1] for _ in range(18)), [])
        junk.append([" ".join(mr), " ".join(hi), None])
    for _ in range(20):
        s_mr = gen.pick(SUBJECTS)[0]
        hi = sum((gen.pick(clean_pairs)[1] for _ in range(3)), [])
        junk.append([s_mr, " ".join(hi), None])
    for j, item in enumerate(junk):
        pairs.insert(30 + j * 20, item)
    patches = [(i, "tgt", fixed) for i, (_, _, fixed) in enumerate(pairs) if fixed is not None]
    pairs = [(m, h) for m, h, _ in pairs]

    half = len(pairs) // 2
    parts = {"tourism": pairs[:half], "health": pairs[half:]}
    manifest = []
    for origin, items in parts.items():
        write_lines(out / "train" / f"{origin}.mr", [m for m, _ in items])
        write_lines(out / "train" / f"{origin}.hi", [h for _, h in items])
        manifest.append(f"{origin}\t{origin}.mr\t{origin}.hi")
    write_lines(out / "train" / "manifest.tsv", manifest)
    write_lines(out / "patches.tsv", [f"{i}\t{s}\t{r}" for i, s, r in sorted(patches)])

    exclude = {" ".join(m) for m, _ in clean_pairs}
    tune = gen.evaluation_set(args.tune, exclude)
    exclude |= {" ".join(m) for m, _ in tune}
    test = gen.evaluation_set(args.test, exclude)
    # The UNK example closes the test set.
    test[-1] = (UNK_MR.split(), "वह घर जाने वालों के साथ जाता था ।".split())
    for name, items in (("tune", tune), ("test", test)):
        write_lines(out / name / f"{name}.mr", [" ".join(m) for m, _ in items])
        write_lines(out / name / f"{name}.hi", [" ".join(h) for _, h in items])

    write_lines(out / "rules.tsv",
                ["# kind\tpattern\temit\tmin_stem_len"] +
                [f"{k}\t{p}\t{e}\t{n}" for k, p, e, n in RULES])
    write_lines(out / "synsets.tsv", [hi + "\t" + "\t".join(mr) for hi, mr in SYNSETS])
    write_lines(out / "function_kridanta.tsv",
                [f"{hi}\t{mr}" for hi, mr in KRIDANTA + FUNCTION_WORDS + CONJUNCTIONS])
    write_lines(out / "verb_phrases.tsv", [f"{hi}\t{mr}" for hi, mr in VERB_PHRASES])

    write_lines(out / "worked" / "split_example.mr", [SPLIT_SOURCE])
    write_lines(out / "worked" / "split_example.expected", [SPLIT_EXPECTED])
    write_lines(out / "worked" / "unk_example.mr", [UNK_MR])
    write_lines(out / "worked" / "unk_example.expected", [UNK_HI])
    write_lines(out / "worked" / "unk_table.txt", [
        "घरी ||| घर ||| 0.9 0.8 0.9 0.8",
        "जाई ||| जाता ||| 0.6 0.7 0.6 0.7",
        "तो ||| वह ||| 0.9 0.9 0.9 0.9",
        ". ||| । ||| 1 1 1 1",
    ])
    write_lines(out / "worked" / "unk_lm.hi", [
        "वह घर जाता ।", "वह घर जाता है ।", "राम घर जाता ।", "वह जाता ।",
    ])
    write_lines(out / "subjective" / "ratings.tsv",
                ["s1\t5\t5", "s2\t5\t4", "s3\t4\t5", "s4\t4\t4"])

    write_lines(out / "matrix.conf", [
        "# Six cumulative configurations x tuning off/on x both directions.",
        "train_manifest = train/manifest.tsv",
        "patches = patches.tsv",
        "rules = rules.tsv",
        "synsets = synsets.tsv",
        "function_kridanta = function_kridanta.tsv",
        "verb_phrases = verb_phrases.tsv",
        "tune_source = tune/tune.mr",
        "tune_target = tune/tune.hi",
        "test_source = test/test.mr",
        "test_target = test/test.hi",
        "corpus_direction = mr-hi",
        "resource_direction = hi-mr",
        "split_language = mr",
        "directions = mr-hi, hi-mr",
        "configs = uncleaned, cleaned, suffix_split, wordnet, function_kridanta, verb_phrases",
        "tuning = off, on",
        f"seed = {args.seed}",
        "assert_ladder = true",
    ])

    # Sanity: base vocabulary must not trip the splitter by accident.
    stems = {m for m, _ in PLACES + PERSONS}
    for m, _ in clean_pairs:
        for tok in m:
            pieces = split_token(tok)
            if len(pieces) > 1 and pieces[0] not in stems and tok != "घरी":
                raise SystemExit(f"unexpected split of {tok}: {pieces}")
    got = " ".join(sum((split_token(t) for t in SPLIT_SOURCE.replace(".", " .").split()), []))
    if got != SPLIT_EXPECTED:
        raise SystemExit(f"worked split mismatch: {got}")


if __name__ == "__main__":
    main()
