# Word lists for the builtin tagger. Closed classes are complete enough for
# edited learner English; open classes cover common words plus everything the
# synthetic grammar generates.

CLOSED = {
    "DT": "the a an this that these those every each some any no another all both either neither",
    "PRP$": "my your his her its our their",
    "PRP": "i you he she it we they me him us them myself himself herself itself ourselves themselves",
    "IN": (
        "in on at with into of for from by about under near over after before during without "
        "through than because if while since as onto upon among between against across behind "
        "beside towards toward within along around unlike"
    ),
    "TO": "to",
    "CC": "and or but nor yet",
    "MD": "can could will would shall should may might must",
    "RB": "not n't very also too often never always really quite just already still again soon here",
    "WDT": "which whatever",
    "WP": "who whom what",
    "EX": "there",
}

# be / have / do
AUXILIARIES = {
    "be": "VB", "am": "VBP", "is": "VBZ", "are": "VBP", "was": "VBD", "were": "VBD",
    "been": "VBN", "being": "VBG",
    "have": "VBP", "has": "VBZ", "had": "VBD", "having": "VBG",
    "do": "VBP", "does": "VBZ", "did": "VBD", "done": "VBN", "doing": "VBG",
}

# base: (3sg, past, past participle, gerund); None entries are regular
IRREGULAR_VERBS = {
    "eat": (None, "ate", "eaten", None),
    "sit": (None, "sat", "sat", "sitting"),
    "see": (None, "saw", "seen", None),
    "find": (None, "found", "found", None),
    "go": ("goes", "went", "gone", None),
    "take": (None, "took", "taken", "taking"),
    "make": (None, "made", "made", "making"),
    "give": (None, "gave", "given", "giving"),
    "get": (None, "got", "got", "getting"),
    "come": (None, "came", "come", "coming"),
    "run": (None, "ran", "run", "running"),
    "feel": (None, "felt", "felt", None),
    "keep": (None, "kept", "kept", None),
    "leave": (None, "left", "left", "leaving"),
    "bring": (None, "brought", "brought", None),
    "buy": (None, "bought", "bought", None),
    "think": (None, "thought", "thought", None),
    "teach": ("teaches", "taught", "taught", None),
    "catch": ("catches", "caught", "caught", None),
    "write": (None, "wrote", "written", "writing"),
    "drive": (None, "drove", "driven", "driving"),
    "speak": (None, "spoke", "spoken", None),
    "sleep": (None, "slept", "slept", None),
    "stand": (None, "stood", "stood", None),
    "hold": (None, "held", "held", None),
    "meet": (None, "met", "met", None),
    "send": (None, "sent", "sent", None),
    "spend": (None, "spent", "spent", None),
    "lose": (None, "lost", "lost", "losing"),
    "fly": ("flies", "flew", "flown", None),
    "sing": (None, "sang", "sung", None),
    "swim": (None, "swam", "swum", "swimming"),
    "know": (None, "knew", "known", None),
    "grow": (None, "grew", "grown", None),
    "say": (None, "said", "said", None),
    "tell": (None, "told", "told", None),
    "become": (None, "became", "become", "becoming"),
    "begin": (None, "began", "begun", "beginning"),
    "forget": (None, "forgot", "forgotten", "forgetting"),
    "put": (None, "put", "put", "putting"),
}

REGULAR_VERBS = (
    "wait walk like play watch carry chase visit open close help need want love hate "
    "look live work call ask answer start finish clean cook paint jump climb listen "
    "return enter travel train crash die push pull kick touch follow miss learn study "
    "practise practice use hope dance smile laugh move stay turn"
).split()

NOUNS = {
    # singular: plural
    "cat": "cats", "dog": "dogs", "man": "men", "woman": "women", "child": "children",
    "teacher": "teachers", "student": "students", "bird": "birds", "mouse": "mice",
    "house": "houses", "garden": "gardens", "book": "books", "table": "tables",
    "box": "boxes", "park": "parks", "friend": "friends", "bus": "buses",
    "window": "windows", "door": "doors", "ball": "balls", "letter": "letters",
    "apple": "apples", "car": "cars", "tree": "trees", "river": "rivers",
    "city": "cities", "school": "schools", "girl": "girls", "boy": "boys",
    "person": "people", "gun": "guns", "pocket": "pockets", "bar": "bars",
    "bowl": "bowls", "glass": "glasses", "salad": "salads", "passenger": "passengers",
    "number": "numbers", "life": "lives", "time": "times", "lot": "lots",
    "part": "parts", "skill": "skills", "relation": "relations", "result": "results",
    "package": "packages", "sunburn": "sunburns", "proportion": "proportions",
    "room": "rooms", "kitchen": "kitchens", "chair": "chairs", "road": "roads",
    "farmer": "farmers", "doctor": "doctors", "baby": "babies", "horse": "horses",
    "train": "trains", "wall": "walls", "shop": "shops", "village": "villages",
}

UNCOUNTABLE = "albinism pigment skin water music food information advice".split()

ADJECTIVES = (
    "big small old young happy red green huge lonely carved venetian proper interpersonal "
    "necessary real prone high tall short new good bad little hungry tired quiet cold "
    "warm busy"
).split()

PUNCTUATION = {
    ".": ".", ",": ",", "?": ".", "!": ".", ":": ":", ";": ":", "(": "(", ")": ")",
    '"': "''", "'": "''", "-": ":", "--": ":",
}


def _regular_forms(base):
    if base.endswith("ie"):
        past, ing = base + "d", base[:-2] + "ying"
    elif base.endswith("e"):
        past, ing = base + "d", base[:-1] + "ing"
    elif base.endswith("y") and base[-2:-1] not in "aeiou":
        past, ing = base[:-1] + "ied", base + "ing"
    else:
        past, ing = base + "ed", base + "ing"
    if base.endswith(("s", "sh", "ch", "x", "z")):
        third = base + "es"
    elif base.endswith("y") and base[-2:-1] not in "aeiou":
        third = base[:-1] + "ies"
    else:
        third = base + "s"
    return third, past, past, ing


def build_lexicon():
    """word -> tuple of candidate tags, most likely first."""
    lex = {}

    def add(word, tag):
        tags = lex.setdefault(word, [])
        if tag not in tags:
            tags.append(tag)

    for tag, words in CLOSED.items():
        for w in words.split():
            add(w, tag)
    for w, tag in AUXILIARIES.items():
        add(w, tag)
    for base in list(IRREGULAR_VERBS) + REGULAR_VERBS:
        regular = _regular_forms(base)
        forms = IRREGULAR_VERBS.get(base, (None,) * 4)
        third, past, participle, ing = (f or r for f, r in zip(forms, regular))
        add(base, "VB")
        add(third, "VBZ")
        add(past, "VBD")
        if participle != past:
            add(participle, "VBN")
        add(ing, "VBG")
    for sing, plural in NOUNS.items():
        add(sing, "NN")
        add(plural, "NNS")
    for w in UNCOUNTABLE:
        add(w, "NN")
    for w in ADJECTIVES:
        add(w, "JJ")
    for w, tag in PUNCTUATION.items():
        add(w, tag)
    return {w: tuple(tags) for w, tags in lex.items()}
