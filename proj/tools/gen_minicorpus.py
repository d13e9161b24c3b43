#!/usr/bin/env python3
"""Generate the bundled mini-corpus under data/mini/.

Six topics, each with a handful of frequent core words and a tail of rarer ones,
plus polysemous words shared by two topics. Word vectors are built from topic
directions so that context decides which sense a polysemous word takes. A second
language ("fr") is a rotated, slightly noisy copy of the English space with a
one-to-one dictionary.

Usage: python3 tools/gen_minicorpus.py [outdir]
"""

import json
import os
import sys

import numpy as np

DIM = 50
RAW_SENTENCES = 2100
SEED = 20240611

TOPICS = {
    "food": (["bread", "cheese", "soup", "kitchen", "recipe"],
             ["butter", "sugar", "flour", "honey", "garlic", "onion", "pepper", "salad", "pasta", "rice",
              "noodle", "oven", "bake", "roast", "spice", "sauce", "dinner", "lunch", "breakfast", "dessert",
              "cake", "cookie", "fruit", "berry", "lemon", "orange", "carrot", "potato", "tomato", "bean",
              "meal", "chef", "menu", "taste", "sweet", "salty", "fresh", "juice", "syrup", "almond", "vinegar", "mustard", "ginger", "cinnamon", "vanilla", "caramel", "pastry", "dough", "broth", "stew", "grill", "skillet", "crust", "yogurt", "cream", "olive", "herb", "basil", "parsley", "mint", "peach", "plum", "cherry", "walnut", "pudding"]),
    "nature": (["forest", "river", "tree", "mountain", "bird"],
               ["meadow", "valley", "lake", "stream", "grass", "moss", "fern", "oak", "pine", "willow",
                "hill", "cliff", "rock", "stone", "soil", "leaf", "branch", "root", "flower", "seed",
                "deer", "fox", "wolf", "rabbit", "owl", "hawk", "trout", "frog", "insect", "bee",
                "habitat", "woodland", "wetland", "shore", "island", "canyon", "trail", "thicket", "vegetation", "bloom", "glacier", "tundra", "prairie", "marsh", "swamp", "reef", "coral", "lichen", "acorn", "cedar", "birch", "maple", "sparrow", "heron", "otter", "beaver", "badger", "moose", "squirrel", "pebble", "boulder", "ridge", "summit", "brook", "pond"]),
    "tech": (["computer", "software", "network", "data", "screen"],
             ["keyboard", "laptop", "server", "program", "code", "internet", "website", "browser", "email", "device",
              "processor", "memory", "storage", "cable", "wireless", "signal", "battery", "phone", "tablet", "camera",
              "sensor", "robot", "algorithm", "database", "cloud", "download", "upload", "update", "install", "digital",
              "pixel", "monitor", "printer", "router", "platform", "interface", "developer", "engineer", "startup", "gadget", "firmware", "kernel", "compiler", "debugger", "bandwidth", "encryption", "password", "login", "account", "app", "smartphone", "touchscreen", "keypad", "modem", "ethernet", "bluetooth", "gigabyte", "megabyte", "hardware", "chipset", "circuit", "transistor", "laser", "satellite", "antenna"]),
    "politics": (["government", "election", "vote", "minister", "law"],
                 ["parliament", "senate", "president", "policy", "campaign", "candidate", "citizen", "democracy", "reform", "tax",
                  "budget", "treaty", "debate", "congress", "governor", "mayor", "council", "ballot", "protest", "rights",
                  "constitution", "justice", "judge", "lawyer", "crime", "police", "diplomat", "embassy", "nation", "leader",
                  "ideology", "liberal", "conservative", "coalition", "opposition", "majority", "minority", "official", "agency", "committee", "senator", "delegate", "referendum", "legislation", "amendment", "veto", "lobby", "regime", "dictator", "monarchy", "republic", "province", "district", "municipal", "census", "tariff", "sanction", "alliance", "summit", "negotiation", "envoy", "ambassador", "bureaucracy", "cabinet", "verdict"]),
    "music": (["song", "band", "guitar", "concert", "album"],
              ["piano", "violin", "drum", "melody", "rhythm", "harmony", "chorus", "lyric", "singer", "orchestra",
               "symphony", "jazz", "rock", "blues", "opera", "tune", "chord", "note", "tempo", "stage",
               "audience", "studio", "recording", "radio", "playlist", "festival", "tour", "composer", "musician", "rehearsal",
               "trumpet", "flute", "cello", "choir", "ballad", "anthem", "acoustic", "vocal", "sound", "beat", "saxophone", "clarinet", "harp", "organ", "banjo", "ukulele", "mandolin", "accordion", "tambourine", "xylophone", "soprano", "tenor", "baritone", "duet", "quartet", "encore", "remix", "verse", "bridge", "refrain", "octave", "sonata", "concerto", "overture", "lullaby"]),
    "sports": (["game", "team", "player", "coach", "goal"],
               ["match", "season", "league", "score", "win", "loss", "ball", "stadium", "fan", "referee",
                "tournament", "champion", "trophy", "medal", "race", "runner", "soccer", "football", "tennis", "hockey",
                "basketball", "baseball", "golf", "swimmer", "athlete", "training", "defense", "offense", "captain", "kick",
                "sprint", "marathon", "cup", "final", "victory", "rival", "jersey", "whistle", "penalty", "serve", "dribble", "tackle", "rebound", "inning", "wicket", "pitcher", "goalkeeper", "striker", "midfielder", "sprinter", "cyclist", "skier", "boxer", "wrestler", "gymnast", "rowing", "sailing", "archery", "fencing", "surfing", "skating", "playoff", "overtime", "halftime", "podium"]),
}

POLYSEMOUS = {
    "apple": ("food", "tech"),
    "bass": ("music", "nature"),
    "court": ("sports", "politics"),
    "pitch": ("sports", "music"),
    "mouse": ("tech", "nature"),
    "party": ("politics", "music"),
    "field": ("sports", "nature"),
    "chip": ("food", "tech"),
}

FILLERS = ["time", "people", "year", "day", "way", "world", "life", "place", "week", "city",
           "country", "new", "good", "first", "last", "long", "great", "little", "old", "big",
           "high", "small", "large", "next", "early", "young", "important", "public", "able", "local",
           "often", "still", "also", "really", "always", "never", "together", "later", "maybe", "almost"]

STOPWORDS = """i me my myself we our ours ourselves you you're you've you'll you'd your yours yourself yourselves
he him his himself she she's her hers herself it it's its itself they them their theirs themselves what which
who whom this that that'll these those am is are was were be been being have has had having do does did doing
a an the and but if or because as until while of at by for with about against between into through during
before after above below to from up down in out on off over under again further then once here there when
where why how all any both each few more most other some such no nor not only own same so than too very s t
can will just don don't should should've now d ll m o re ve y ain aren aren't couldn couldn't didn didn't
doesn doesn't hadn hadn't hasn hasn't haven haven't isn isn't ma mightn mightn't mustn mustn't needn needn't
shan shan't shouldn shouldn't wasn wasn't weren weren't won won't wouldn wouldn't""".split()

SENTENCE_STOPWORDS = ["the", "a", "and", "of", "to", "in", "is", "was", "with", "for", "on", "at", "by",
                      "from", "that", "this", "it", "they", "we", "their", "our", "very", "more", "after",
                      "before", "during", "about", "into", "over", "some", "all", "then", "there", "when"]

ENDINGS = [". ", ". ", ". ", "! ", "? ", "; ", ", "]


def unit(v):
    return v / np.linalg.norm(v)


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "data", "mini")
    os.makedirs(out, exist_ok=True)
    rng = np.random.default_rng(SEED)

    topic_names = list(TOPICS)
    topic_dir = {t: unit(rng.standard_normal(DIM)) for t in topic_names}
    filler_dir = unit(rng.standard_normal(DIM))
    function_dir = unit(rng.standard_normal(DIM))

    vectors = {}

    def add(word, v):
        if word not in vectors:
            vectors[word] = v * rng.uniform(0.8, 1.6)

    for t, (core, tail) in TOPICS.items():
        for w in core:
            add(w, topic_dir[t] + 0.6 * unit(rng.standard_normal(DIM)))
        for w in tail:
            add(w, 0.8 * topic_dir[t] + 0.8 * unit(rng.standard_normal(DIM)))
    for w, (a, b) in POLYSEMOUS.items():
        add(w, 0.7 * topic_dir[a] + 0.7 * topic_dir[b] + 0.4 * unit(rng.standard_normal(DIM)))
    for w in FILLERS:
        add(w, 0.3 * filler_dir + unit(rng.standard_normal(DIM)))
    for w in STOPWORDS:
        add(w, 0.5 * function_dir + 0.8 * unit(rng.standard_normal(DIM)))

    poly_by_topic = {t: [w for w, ts in POLYSEMOUS.items() if t in ts] for t in topic_names}
    filler_p = 1.0 / np.arange(1, len(FILLERS) + 1)
    filler_p /= filler_p.sum()
    tail_p = 1.0 / np.arange(1, 66) ** 0.6
    tail_p /= tail_p.sum()

    sentences = []
    for _ in range(RAW_SENTENCES):
        t = topic_names[rng.integers(len(topic_names))]
        core, tail = TOPICS[t]
        content = list(rng.choice(core, size=2 + int(rng.random() < 0.5), replace=False))
        if rng.random() < 0.65:
            content.append(poly_by_topic[t][rng.integers(len(poly_by_topic[t]))])
        content += list(rng.choice(tail, size=int(rng.integers(1, 4)), p=tail_p))
        content += list(rng.choice(FILLERS, size=int(rng.integers(0, 3)), p=filler_p))
        words = list(content)
        for _ in range(int(rng.integers(1, 5))):
            words.insert(int(rng.integers(len(words) + 1)), SENTENCE_STOPWORDS[rng.integers(len(SENTENCE_STOPWORDS))])
        r = rng.random()
        if r < 0.02:
            words = words[:1]
        elif r < 0.04:
            while len(words) < 22:
                words.append(SENTENCE_STOPWORDS[rng.integers(len(SENTENCE_STOPWORDS))])
                words.append(tail[rng.integers(len(tail))])
        if rng.random() < 0.05 and len(words) > 3:
            words[1] = "(" + words[1] + ")"
        text = " ".join(words)
        sentences.append(text[0].upper() + text[1:] + ENDINGS[rng.integers(len(ENDINGS))])

    with open(os.path.join(out, "corpus_en.txt"), "w") as f:
        for i in range(0, len(sentences), 8):
            f.write("".join(sentences[i:i + 8]).rstrip() + "\n")

    words = list(vectors)
    with open(os.path.join(out, "emb_en.vec"), "w") as f:
        f.write(f"{len(words)} {DIM}\n")
        for w in words:
            f.write(w + " " + " ".join(f"{x:.6f}" for x in vectors[w]) + "\n")

    # Second language: rotated copy with small noise, content words only.
    q, _ = np.linalg.qr(rng.standard_normal((DIM, DIM)))
    fr_words = [w for w in words if w not in set(STOPWORDS)]
    with open(os.path.join(out, "emb_fr.vec"), "w") as f:
        f.write(f"{len(fr_words)} {DIM}\n")
        for w in fr_words:
            v = q @ vectors[w] + rng.uniform(-0.01, 0.01, DIM)
            f.write(w + "_fr " + " ".join(f"{x:.6f}" for x in v) + "\n")
    with open(os.path.join(out, "dict_fr_en.txt"), "w") as f:
        for w in fr_words:
            f.write(f"{w}_fr\t{w}\n")

    with open(os.path.join(out, "stopwords_en.txt"), "w") as f:
        f.write("\n".join(STOPWORDS) + "\n")

    config = {
        "profile": "desk",
        "seed": 42,
        "language": "en",
        "paths": {
            "corpus": ["corpus_en.txt"],
            "embeddings": {"en": "emb_en.vec", "fr": "emb_fr.vec"},
            "stopwords": "stopwords_en.txt",
            "dictionary": "dict_fr_en.txt",
            "workdir": "work",
        },
        "corpus": {"min_length": 2, "max_length": 20},
        "sid": {"upper": 5000, "lower": 128},
        "attention": {"expansion": 4.0},
        "dcn": {"layers": [200, 200, 800, 10, 800, 200, 200], "learning_rate": 0.003, "batch_size": 64,
                "lambda": 0.5, "epochs": 12, "finetune_epochs": 3, "loops": 10, "shuffle_window": 500},
        "report": {"top_n": 6},
    }
    with open(os.path.join(out, "config.json"), "w") as f:
        json.dump(config, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
