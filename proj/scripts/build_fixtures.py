#!/usr/bin/env python3
"""Regenerate the fixture corpus under data/.

Writes the sample venue catalog, the mindmap corpus, wrapper configs, the
canned HTML pages and sidecar text files served by the fixture fetcher, and
the fixture-backed service config.

Before writing, the expected scenario outcomes are recomputed here with a
separate implementation (tokenizer, stopwords, term scoring, Levenshtein,
venue matching, dedup) and asserted, so the fixtures provably produce the
pinned results under the documented algorithms.

Usage: python3 scripts/build_fixtures.py [--check]
"""

import argparse
import json
import string
import sys
from fractions import Fraction
from pathlib import Path
from urllib.parse import quote
from xml.sax.saxutils import escape, quoteattr

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
PAGES = DATA / "fixtures" / "pages"


# ---------------------------------------------------------------------------
# independent helpers

def fnv1a64(s: str) -> str:
    h = 0xCBF29CE484222325
    for b in s.encode("utf-8"):
        h ^= b
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def url_escape(v: str) -> str:
    return quote(v, safe="")


PUNCT = set(string.punctuation)


def tokenize(s: str):
    out, cur = [], ""
    chars = list(s)
    for i, c in enumerate(chars):
        if c.isspace():
            if cur:
                out.append(cur.rstrip("-"))
            cur = ""
        elif c == "-":
            nxt = chars[i + 1] if i + 1 < len(chars) else ""
            if cur and not cur.endswith("-") and nxt and not nxt.isspace() and nxt not in PUNCT:
                cur += "-"
        elif c not in PUNCT:
            cur += c.lower()
    if cur:
        out.append(cur.rstrip("-"))
    return [t for t in out if t]


def load_stopwords():
    words = set()
    for line in (DATA / "stopwords_en.txt").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.update(tokenize(line))
    return words


WEIGHTS = {"Topic": Fraction(2), "LargerTopic": Fraction(2), "KeywordsObject": Fraction(7, 4),
           "Question": Fraction(3, 2), "Hot": Fraction(3, 2), "NeedsAction": Fraction(3, 2),
           "WaitingTopic": Fraction(3, 2)}


def score(docs):
    """docs: list of (terms, weight). Exact rational W per term."""
    df = {}
    for terms, _ in docs:
        for t in set(terms):
            df[t] = df.get(t, 0) + 1
    W = {}
    for t, n in df.items():
        total = Fraction(0)
        for terms, w in docs:
            f = terms.count(t)
            if f:
                total += Fraction(f * n) * w / len(terms)
        W[t] = total / n
    return sorted(W.items(), key=lambda kv: (-kv[1], kv[0]))


def lev(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def match_venue(s, catalog):
    best = None
    for acr, title in catalog:
        d = lev(s, acr) + lev(s, title)
        if best is None or d < best[0]:
            best = (d, acr, title)
    return best


def canonical(s: str) -> str:
    out = []
    word = ""
    for c in s:
        if c.isspace() or c in PUNCT:
            if word:
                out.append(word)
            word = ""
        else:
            word += c.lower()
    if word:
        out.append(word)
    return " ".join(out)


# ---------------------------------------------------------------------------
# venue catalog

CATALOG = [
    ("VLDB", "Very Large Database Conference"),
    ("PVLDB", "Proceedings of the VLDB Endowment"),
    ("SIGMOD", "ACM SIGMOD International Conference on Management of Data"),
    ("ICDE", "International Conference on Data Engineering"),
    ("KDD", "ACM SIGKDD Conference on Knowledge Discovery and Data Mining"),
    ("CIKM", "Conference on Information and Knowledge Management"),
    ("SIGIR", "ACM SIGIR Conference on Research and Development in Information Retrieval"),
    ("WWW", "International World Wide Web Conference"),
    ("EDBT", "International Conference on Extending Database Technology"),
    ("TKDE", "IEEE Transactions on Knowledge and Data Engineering"),
    ("TODS", "ACM Transactions on Database Systems"),
    ("ECIR", "European Conference on Information Retrieval"),
    ("BMC Bioinformatics", "BMC Bioinformatics"),
    ("Nucleic Acids Res", "Nucleic Acids Research"),
    ("PLoS Comput Biol", "PLoS Computational Biology"),
    ("RECOMB", "International Conference on Research in Computational Molecular Biology"),
    ("ISMB", "Intelligent Systems for Molecular Biology"),
    ("BIBM", "IEEE International Conference on Bioinformatics and Biomedicine"),
    ("TCBB", "IEEE/ACM Transactions on Computational Biology and Bioinformatics"),
    ("RNA", "RNA: A Publication of the RNA Society"),
]


# ---------------------------------------------------------------------------
# mindmaps

class N:
    def __init__(self, id, text, icons=(), note=None, link=None, cloud=False, kind=None, children=()):
        self.id, self.text, self.icons, self.note = id, text, list(icons), note
        self.link, self.cloud, self.kind, self.children = link, cloud, kind, list(children)


ICON_KIND = {"idea": "Topic", "full-1": "LargerTopic", "hourglass": "WaitingTopic", "clock": "WaitingTopic",
             "bell": "NeedsAction", "pencil": "NeedsAction", "messagebox_warning": "Hot", "yes": "Hot",
             "info": "Detail", "attach": "Link", "xmag": "KeywordsObject", "list": "KeywordsObject",
             "launch": "CodeObject", "help": "Question", "flag": "Topic"}


def kind_of(n: N) -> str:
    if n.kind:
        return n.kind
    for i in n.icons:
        if i in ICON_KIND:
            return ICON_KIND[i]
    if n.note:
        return "Detail"
    if n.link:
        return "Link"
    if n.cloud:
        return "Cloud"
    return "Topic"


def mm(root: N, comment=True) -> str:
    out = ['<map version="1.0.1">']
    if comment:
        out.append("<!-- To view this file, download free mind mapping software FreeMind from "
                   "http://freemind.sourceforge.net -->")

    def emit(n: N, depth: int):
        ind = " " * depth
        attrs = f'ID={quoteattr(n.id)}' if n.id else ""
        if n.link:
            attrs += f" LINK={quoteattr(n.link)}"
        attrs += f" TEXT={quoteattr(n.text)}"
        inner = []
        if n.cloud:
            inner.append(ind + " <cloud/>")
        for i in n.icons:
            inner.append(ind + f' <icon BUILTIN="{i}"/>')
        if n.kind:
            inner.append(ind + f' <attribute NAME="kind" VALUE="{n.kind}"/>')
        if n.note:
            paras = "".join(f"<p>{escape(p)}</p>" for p in n.note.split("\n"))
            inner.append(ind + f' <richcontent TYPE="NOTE"><html><head></head><body>{paras}</body></html></richcontent>')
        if not inner and not n.children:
            out.append(ind + f"<node {attrs.strip()}/>")
            return
        out.append(ind + f"<node {attrs.strip()}>")
        out.extend(inner)
        for c in n.children:
            emit(c, depth + 1)
        out.append(ind + "</node>")

    emit(root, 0)
    out.append("</map>")
    return "\n".join(out) + "\n"


def walk(n, depth=0, parent=None):
    yield n, parent
    for c in n.children:
        yield from walk(c, depth + 1, n)


def neighbourhood(root, selected, level):
    adj = {}
    for n, p in walk(root):
        adj.setdefault(n.id, [])
        if p:
            adj[p.id].append(n.id)
            adj[n.id].append(p.id)
    dist = {s: 0 for s in selected}
    frontier = list(selected)
    while frontier:
        nxt = []
        for u in frontier:
            if dist[u] == level:
                continue
            for v in adj[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    nxt.append(v)
        frontier = nxt
    return set(dist)


def expansion(root, selected, level, k, base, stop):
    inc = neighbourhood(root, selected, level)
    docs = []
    for n, _ in walk(root):
        if n.id not in inc:
            continue
        content = n.text + ("\n" + n.note if n.note else "")
        terms = [t for t in tokenize(content) if t not in stop]
        if terms:
            docs.append((terms, WEIGHTS.get(kind_of(n), Fraction(1))))
    base_terms = tokenize(base)
    ranked = [(t, w) for t, w in score(docs) if t not in base_terms]
    return base_terms, ranked[:k], ranked


def microrna_map():
    return N("ID_microrna", "microRNA", children=[
        N("ID_targets", "microRNA targets", children=[
            N("ID_prediction", "microRNA target prediction", children=[
                N("ID_diana", "DIANA-microT", link="http://diana.cslab.ece.ntua.gr/microT/",
                  note="Introduced in 2004, since then significantly improved.\n"
                       "Shown with pSILAC to be the most precise program available."),
                N("ID_targetscan", "TargetScan", link="http://www.targetscan.org/",
                  note="Provides several features that affect miRNA targeting."),
                N("ID_naive_bayes", "Naive Bayes", icons=["idea"], children=[
                    N("ID_which_methods", "Which methods?", icons=["help"]),
                    N("ID_training_idea", "Training idea",
                      note="Training learning functions using Naive Bayes models"),
                ]),
            ]),
            N("ID_tarbase", "TarBase", icons=["list"], link="http://diana.cslab.ece.ntua.gr/tarbase/",
              note="Experimentally supported targets, more than one thousand entries for human and mouse."),
        ]),
        N("ID_transcripts", "microRNA transcripts", children=[
            N("ID_pre_mirna", "pre-miRNA stem-loop structures",
              note="70-nucleotide precursors processed by Dicer in the cytoplasm."),
            N("ID_risc", "RISC complex", icons=["info"]),
        ]),
        N("ID_features", "Binding site features", icons=["xmag"], cloud=True, children=[
            N("ID_conservation", "evolutionary conservation"),
            N("ID_accessibility", "structural accessibility"),
            N("ID_composition", "nucleotide composition"),
        ]),
    ])


def clustering_map():
    return N("ID_root", "Data mining", children=[
        N("ID_clustering_algorithms", "Clustering algorithms overview", icons=["flag-green"], children=[
            N("ID_improve", "How to improve clustering", icons=["flag-blue", "flag-green"], children=[
                N("ID_rank_based", "Rank-based similarity", icons=["flag-green"]),
                N("ID_snn", "Related idea", icons=["flag-green"], note="Shared nearest neighbours"),
            ]),
            N("ID_density", "Density-based methods", children=[
                N("ID_dbscan", "DBSCAN", link="http://en.wikipedia.org/wiki/DBSCAN"),
            ]),
        ]),
        N("ID_classification", "Classification", children=[N("ID_svm", "Support vector machines")]),
    ])


def corpus_maps():
    maps = {
        "microrna.mm": microrna_map(),
        "clustering.mm": clustering_map(),
        "kinds.mm": N("ID_k0", "Element kinds", children=[
            N("ID_k1", "plain topic"),
            N("ID_k2", "larger topic", icons=["full-1"]),
            N("ID_k3", "waiting", icons=["hourglass"]),
            N("ID_k4", "needs action", icons=["bell"]),
            N("ID_k5", "hot", icons=["messagebox_warning"]),
            N("ID_k6", "detail", note="a detail note"),
            N("ID_k7", "http://example.org/", link="http://example.org/"),
            N("ID_k8", "keywords", icons=["xmag"]),
            N("ID_k9", "code", icons=["launch"]),
            N("ID_k10", "question", icons=["help"]),
            N("ID_k11", "cloud", cloud=True),
            N("ID_k12", "explicit kind", kind="Hot"),
            N("ID_k13", "linked detail", link="http://example.org/d", note="note wins over link"),
        ]),
        "unicode.mm": N("ID_u0", "Μηχανική μάθηση", children=[
            N("ID_u1", "Größenordnung & <Tags> \"quoted\""),
            N("ID_u2", "日本語のノード", note="多行\n注釈"),
            N("ID_u3", "emoji 🚀 node"),
        ]),
        "deep.mm": None,
        "notes.mm": N("ID_n0", "Notes", children=[
            N("ID_n1", "multi", note="first paragraph\nsecond paragraph\nthird"),
            N("ID_n2", "escaped", note="a < b && c > d"),
        ]),
        "links.mm": N("ID_l0", "Reading list", children=[
            N("ID_l1", "DBLP", link="http://dblp.uni-trier.de/"),
            N("ID_l2", "PubMed", link="http://www.ncbi.nlm.nih.gov/pubmed/?term=a&b=c"),
            N("ID_l3", "CiteSeerX", link="http://citeseerx.ist.psu.edu/", icons=["attach"]),
        ]),
        "single.mm": N("ID_only", "A lonely root"),
        "clouds.mm": N("ID_c0", "Clouds", cloud=True, children=[
            N("ID_c1", "inner", cloud=True, icons=["yes"]),
            N("ID_c2", "outer", children=[N("ID_c3", "leaf", cloud=True)]),
        ]),
        "wide.mm": N("ID_w0", "Wide", children=[N(f"ID_w{i}", f"child {i}") for i in range(1, 41)]),
        "creativity.mm": N("ID_cc0", "Creativity cycle", icons=["idea"], children=[
            N("ID_cc1", "Set up domain", icons=["pencil"]),
            N("ID_cc2", "Search", icons=["xmag"], children=[
                N("ID_cc3", "Vertical search"), N("ID_cc4", "Horizontal search")]),
            N("ID_cc5", "Organize", icons=["list"]),
            N("ID_cc6", "Refine", icons=["clock"]),
        ]),
    }
    deep = N("ID_d20", "depth 20")
    for i in range(19, -1, -1):
        deep = N(f"ID_d{i}", f"depth {i}", children=[deep])
    maps["deep.mm"] = deep
    return maps


# ---------------------------------------------------------------------------
# search fixtures

BLOG_BASE = "http://blogsearch.google.com/blogsearch?hl=en&oi=spell&ie=UTF-8&q={}&btnG=Search+Blogs"
DBLP_BASE = "http://dblp.fixture/search?q={}"
PUBMED_BASE = "http://pubmed.fixture/?term={}"
WEB_BASE = "http://web.fixture/search?q={}"

BLOG_PAGE = """<html><head><title>ubuntu - Google Blog Search</title></head>
<body>
<table><tr><td>
<font size=-1>
...1st result
<a href="http://www.howtoforge.com/how-to-upgrade-ubuntu-10.04-..." id="p-1">
How To Upgrade <b>Ubuntu</b> 10.04 (Lucid Lynx) To 10.10 (Maverick Meerkat)
(Desktop; Server)<br>
</font>
<font size=-1>
...2nd result
<a class=f1 href="http://www.howtoforge.com/" id="pb-1"
title="http://www.howtoforge.com/">
HowtoForge - Linux Howtos and Tutorials - -
http://www.howtoforge.com/</a>
</font>
</td>
</tr>
</table>
<p class=g></p>
...3rd result
<a href="http://www.readwriteweb.com/cloud/2010/10/latest-ubuntu-1010-emphasizes.php"
id="p-2">
Latest <b>Ubuntu</b> 10.10 Emphasizes the Cloud - ReadWriteCloud</a>
<table border=0 cellpadding=0 cellspacing=0><tr><td class=j>
<font color=#555555 size=-1>11 hours ago </font>
<font color=#555555 size=-1>by Audrey Watters</font><br><font size=-1>
Open source operating system <b>Ubuntu</b> 10.10 is available to download today for desktop,
notebook, and server editions. Hooray for well-timed 10.10;s. All these versions are
emphasizing Canonical embracing
...
</body></html>
"""

BLOG_CONFIG = """<?xml version="1.0" encoding="UTF-8"?>
<config charset="UTF-8">
<var-def name="searchQuery" overwrite="false"/>
<var-def name="content">
<html-to-xml>
 <http url="http://blogsearch.google.com/blogsearch?hl=en&amp;oi=spell&amp;ie=UTF-8&amp;q=${searchQuery}&amp;btnG=Search+Blogs"/>
</html-to-xml>
</var-def>
<var-def name="results1">
 <xpath expression="//a[contains(@id,'p-')]">
  <var name="content"/>
 </xpath>
</var-def>
<var-def name="results2">
 <xpath expression="//td[@class='j']">
  <var name="content"/>
 </xpath>
</var-def>
</config>
"""

DBLP_CONFIG = """<?xml version="1.0" encoding="UTF-8"?>
<config charset="UTF-8">
  <var-def name="searchQuery" overwrite="false"/>
  <var-def name="page">
    <html-to-xml>
      <http url="http://dblp.fixture/search?q=${searchQuery}"/>
    </html-to-xml>
  </var-def>
  <var-def name="titles">
    <xpath expression="//li[@class='entry']/a[@class='ee']"><var name="page"/></xpath>
  </var-def>
  <var-def name="authors">
    <xpath expression="//li[@class='entry']/span[@class='authors']"><var name="page"/></xpath>
  </var-def>
  <var-def name="venues">
    <xpath expression="//li[@class='entry']/span[@class='venue']"><var name="page"/></xpath>
  </var-def>
  <var-def name="years">
    <xpath expression="//li[@class='entry']/span[@class='year']"><var name="page"/></xpath>
  </var-def>
</config>
"""

PUBMED_CONFIG = """<?xml version="1.0" encoding="UTF-8"?>
<config charset="ISO-8859-1">
  <var-def name="searchQuery" overwrite="false"/>
  <var-def name="page">
    <html-to-xml>
      <http url="http://pubmed.fixture/?term=${searchQuery}"/>
    </html-to-xml>
  </var-def>
  <var-def name="links">
    <xpath expression="//div[@class='rprt']/p[@class='title']/a"><var name="page"/></xpath>
  </var-def>
  <var-def name="authors">
    <xpath expression="//div[@class='rprt']/p[@class='desc']"><var name="page"/></xpath>
  </var-def>
  <var-def name="journals">
    <xpath expression="//div[@class='rprt']/p[@class='details']/span[@class='jrnl']"><var name="page"/></xpath>
  </var-def>
  <var-def name="dates">
    <xpath expression="//div[@class='rprt']/p[@class='details']/span[@class='date']"><var name="page"/></xpath>
  </var-def>
  <var-def name="abstracts">
    <xpath expression="//div[@class='rprt']/p[@class='abstr']"><var name="page"/></xpath>
  </var-def>
</config>
"""

WEB_CONFIG = """<?xml version="1.0" encoding="UTF-8"?>
<config charset="UTF-8">
  <var-def name="searchQuery" overwrite="false"/>
  <var-def name="page">
    <html-to-xml>
      <http url="http://web.fixture/search?q=${searchQuery}"/>
    </html-to-xml>
  </var-def>
  <var-def name="hits">
    <xpath expression="//div[@class='hit']/a"><var name="page"/></xpath>
  </var-def>
  <var-def name="snippets">
    <xpath expression="//div[@class='hit']/span[@class='snippet']"><var name="page"/></xpath>
  </var-def>
</config>
"""

D = [  # dblp, priority 1
    dict(title="A Naive Bayes approach to microRNA target prediction", authors="Anna Keller, Marco Rossi",
         venue="Nucleic Acids Research", year=2009, url="http://dblp.fixture/rec/journals/nar/KellerR09"),
    dict(title="Learning microRNA target sites with probabilistic classifiers", authors="Jun Li, Sara Novak",
         venue="BMC Bioinformatics", year=2008, url="http://dblp.fixture/rec/journals/bmcbi/LiN08"),
    dict(title="Feature selection methods for miRNA target prediction", authors="Peter Haas",
         venue="IEEE International Conference on Bioinformatics and Biomedicine", year=2010, url="http://dblp.fixture/rec/conf/bibm/Haas10"),
    dict(title="Comparing machine learning methods for target prediction of microRNAs",
         authors="Elena Petrova, Tom Walsh, Ines Duarte", venue="PLoS Computational Biology", year=2010,
         url="http://dblp.fixture/rec/journals/ploscb/PetrovaWD10"),
    dict(title="Bayesian models of microRNA regulation", authors="Hiro Sato", venue="International Conference on Research in Computational Molecular Biology", year=2007,
         url="http://dblp.fixture/rec/conf/recomb/Sato07"),
]
P = [  # pubmed, priority 2
    dict(title="A naive Bayes approach to microRNA target prediction.", authors="Keller A; Rossi M",
         venue="Nucleic Acids Res", date="2009 Jun", url="http://pubmed.fixture/19400001",
         abstract="We present a naive Bayes classifier that combines conservation, accessibility and "
                  "seed features to predict microRNA targets."),
    dict(title="MicroRNA target prediction by expression analysis of host genes.", authors="Gennarino VA; Sardiello M",
         venue="BMC Bioinformatics", date="2009 Mar", url="http://pubmed.fixture/19088304",
         abstract="Host gene expression profiles are used to rank candidate microRNA targets."),
    dict(title="Comparing machine learning methods for target prediction of microRNAs.",
         authors="Petrova E; Walsh T; Duarte I", venue="PLoS Comput Biol", date="2010 Jan",
         url="http://pubmed.fixture/20100002",
         abstract="Six classifiers are compared on experimentally supported targets."),
    dict(title="Naive Bayes classification of microRNA binding sites.", authors="Okafor C",
         venue="PLoS Comput Biol", date="2011 Feb", url="http://pubmed.fixture/21300003",
         abstract="A probabilistic model of binding sites trained on CLIP data."),
    dict(title="Evolutionary conservation in microRNA target prediction methods.", authors="Moreau L; Berg K",
         venue="Nucleic Acids Res", date="2008 Nov", url="http://pubmed.fixture/19000004",
         abstract="Conservation filters improve precision at the cost of recall."),
]


def dblp_page(records):
    items = []
    for r in records:
        items.append(f"<li class=entry><span class=authors>{escape(r['authors'])}</span>:\n"
                     f"  <a class=ee href=\"{r['url']}\">{escape(r['title'])}</a>\n"
                     f"  <span class=venue>{escape(r['venue'])}</span> <span class=year>{r['year']}</span>")
    body = "\n".join(items)
    return (f"<html><head><title>dblp: search</title></head><body>\n<h2>Publications</h2>\n"
            f"<ul class=result-list>\n{body}\n</ul>\n<p>Copyright dblp team</body></html>\n")


def pubmed_page(records):
    items = []
    for r in records:
        items.append(f"<div class=\"rprt\">\n <p class=\"title\"><a href=\"{r['url']}\">{escape(r['title'])}</a>\n"
                     f" <p class=\"desc\">{escape(r['authors'])}\n"
                     f" <p class=\"details\"><span class=\"jrnl\">{escape(r['venue'])}</span>. "
                     f"<span class=\"date\">{r['date']}</span>;\n"
                     f" <p class=\"abstr\">{escape(r['abstract'])}\n</div>")
    body = "\n".join(items)
    return f"<html><body>\n<div id=\"maincontent\">\n{body}\n</div>\n</body></html>\n"


def web_page(hits):
    items = "\n".join(f"<div class=hit><a href=\"{u}\">{escape(t)}</a><br><span class=snippet>{escape(s)}</span></div>"
                      for t, u, s in hits)
    return f"<html><body><div id=res>\n{items}\n</div></body></html>\n"


DOC_URL_REVIEW = "http://citeseer.fixture/viewdoc/review-mirna-2010.pdf"
DOC_URL_MAIN = "http://www.univ.fixture/~keller/papers/keller09-naive-bayes.pdf"
SLIDES_URL = "http://www.univ.fixture/~keller/talks/keller09-ismb.ppt"

DOC_REVIEW_TEXT = """A review of computational microRNA target identification
Lena Ortiz

Abstract
We survey seed matching, conservation and energy based predictors.

1 Introduction
Target prediction programs combine several features.
"""

DOC_MAIN_TEXT = """A Naive Bayes Approach to
MicroRNA Target Prediction

Anna Keller and Marco Rossi

Abstract
MicroRNAs regulate gene expression by binding to the 3' UTR of target genes.
We train naive Bayes models on conservation, accessibility and nucleotide
composition features and report improved precision on TarBase.

1 Introduction
Most target prediction programs use several features to identify putative sites.

2 Related Work
DIANA-microT and TargetScan were the first algorithms to predict targets in humans.

3 Naive Bayes Model
Each feature contributes an independent likelihood term.

4 Experimental Evaluation
We evaluate on experimentally supported targets.

5 Conclusions
Learning functions trained with naive Bayes are competitive.
"""

SLIDES_TEXT = """A Naive Bayes approach to microRNA target prediction
Anna Keller, ISMB 2009

Outline
- Motivation
- Features
- Naive Bayes Model
- Results
"""

BLOG_POSTS_PAGE = """<html><body>
<a href="http://mirnablog.fixture/2009/07/naive-bayes-targets.html" id="p-1">
Naive Bayes for <b>microRNA</b> targets: a reading note</a>
<table border=0><tr><td class=j>
<font size=-1>by Priya N</font><br>Notes on Keller and Rossi's classifier.
</td></tr></table>
<a href="http://genomics.fixture/posts/keller-rossi-2009" id="p-2">
Probabilistic target prediction, revisited</a>
<table border=0><tr><td class=j>Another look at combining conservation and accessibility.</td></tr></table>
</body></html>
"""

EMPTY_RESULTS_PAGE = "<html><body><p>No results found.</p></body></html>\n"


def scenario_pages(expanded_query):
    pages = {}
    pages[DBLP_BASE.format(url_escape(expanded_query))] = dblp_page(D)
    pages[PUBMED_BASE.format(url_escape(expanded_query))] = pubmed_page(P)
    pages[DBLP_BASE.format(url_escape("zzzz"))] = EMPTY_RESULTS_PAGE
    pages[PUBMED_BASE.format(url_escape("zzzz"))] = EMPTY_RESULTS_PAGE
    pages[BLOG_BASE.format("ubuntu")] = BLOG_PAGE

    t = D[0]["title"]
    quoted = f'"{t}"'
    pages[WEB_BASE.format(url_escape(quoted + " filetype:pdf"))] = web_page([
        ("A review of computational microRNA target identification", DOC_URL_REVIEW, "survey of predictors"),
        ("A Naive Bayes Approach to MicroRNA Target Prediction", DOC_URL_MAIN, "Keller, Rossi. Nucleic Acids Research 2009"),
    ])
    pages[WEB_BASE.format(url_escape(quoted + " filetype:ppt"))] = web_page([
        ("Naive Bayes microRNA targets (ISMB talk)", SLIDES_URL, "slides"),
    ])
    family = D[0]["authors"].split(",")[0].split()[-1]
    pages[BLOG_BASE.format(url_escape(f"{t} {family}"))] = BLOG_POSTS_PAGE
    texts = {DOC_URL_REVIEW: DOC_REVIEW_TEXT, DOC_URL_MAIN: DOC_MAIN_TEXT, SLIDES_URL: SLIDES_TEXT}
    return pages, texts


SERVICE_TOML = """# Fixture-backed service: every URL is answered from fixtures/pages.
mindmap_path  = "maps/microrna.mm"
catalog_path  = "venues.tsv"
stopword_path = "stopwords_en.txt"
fixtures_dir  = "fixtures/pages"

[server]
host = "127.0.0.1"
port = 8080

[defaults]
k = 4
level = 1
limit = 10
timeout_s = 10
m_sections = 2

[doc_weights]
Topic = 2.0
LargerTopic = 2.0
KeywordsObject = 1.75
Question = 1.5

[[sources]]
name = "dblp"
config_path = "wrappers/dblp.xml"
priority = 1
[sources.result_mapping]
title = "titles"
url = "titles@href"
authors = "authors"
venue = "venues"
date = "years"

[[sources]]
name = "pubmed"
config_path = "wrappers/pubmed.xml"
priority = 2
[sources.result_mapping]
title = "links"
url = "links@href"
authors = "authors"
venue = "journals"
date = "dates"
abstract = "abstracts"

[engines.horizontal]
name = "web"
config_path = "wrappers/web.xml"
filetype_style = "operator"
[engines.horizontal.result_mapping]
title = "hits"
url = "hits@href"
snippet = "snippets"

[engines.blog]
name = "blogsearch"
config_path = "wrappers/blog.xml"
[engines.blog.result_mapping]
title = "results1"
url = "results1@href"
"""


# ---------------------------------------------------------------------------

def verify(stop):
    # semantic expansion scenarios
    base, top, _ = expansion(clustering_map(), {"ID_improve"}, 1, 4, "", stop)
    assert {t for t, _ in top} == {"clustering", "improve", "rank-based", "similarity"}, top
    base, top, _ = expansion(microrna_map(), {"ID_naive_bayes"}, 1, 4, "Naive Bayes", stop)
    assert set(base) | {t for t, _ in top} == {"methods", "naive", "bayes", "target", "microrna", "prediction"}, top
    expanded = " ".join(base + [t for t, _ in top])

    # venue pins
    for s in ("Very Large Database Conf", "VLDB Conf"):
        assert match_venue(s, CATALOG)[1] == "VLDB", (s, match_venue(s, CATALOG))
    assert lev("VLDD", "VLDB Conf") == 6

    # normalization + dedup of the two scenario sources
    def norm(v):
        return match_venue(v, CATALOG)[1]
    assert [norm(r["venue"]) for r in D] == ["Nucleic Acids Res", "BMC Bioinformatics", "BIBM",
                                             "PLoS Comput Biol", "RECOMB"], [norm(r["venue"]) for r in D]
    assert [norm(r["venue"]) for r in P] == ["Nucleic Acids Res", "BMC Bioinformatics", "PLoS Comput Biol",
                                             "PLoS Comput Biol", "Nucleic Acids Res"], [norm(r["venue"]) for r in P]
    d_keys = [(r["year"], canonical(r["title"]), norm(r["venue"])) for r in D]
    p_keys = [(int(r["date"][:4]), canonical(r["title"]), norm(r["venue"])) for r in P]
    survivors = list(D) + [r for r, k in zip(P, p_keys) if k not in set(d_keys)]
    assert len(survivors) == 8, [r["title"] for r in survivors]
    return expanded


def build(check_only=False):
    stop = load_stopwords()
    expanded = verify(stop)
    print(f"expanded scenario query: {expanded}")
    if check_only:
        return

    (DATA / "venues.tsv").write_text(
        "# acronym<TAB>title, first match wins ties\n" + "".join(f"{a}\t{t}\n" for a, t in CATALOG), encoding="utf-8")

    maps_dir = DATA / "maps"
    maps_dir.mkdir(parents=True, exist_ok=True)
    for name, root in corpus_maps().items():
        (maps_dir / name).write_text(mm(root), encoding="utf-8")

    wdir = DATA / "wrappers"
    wdir.mkdir(parents=True, exist_ok=True)
    (wdir / "blog.xml").write_text(BLOG_CONFIG, encoding="utf-8")
    (wdir / "dblp.xml").write_text(DBLP_CONFIG, encoding="utf-8")
    (wdir / "pubmed.xml").write_text(PUBMED_CONFIG, encoding="latin-1")
    (wdir / "web.xml").write_text(WEB_CONFIG, encoding="utf-8")

    PAGES.mkdir(parents=True, exist_ok=True)
    for old in PAGES.glob("*"):
        old.unlink()
    pages, texts = scenario_pages(expanded)
    index = ["# url<TAB>file"]
    for url, body in sorted(pages.items()):
        name = fnv1a64(url) + ".html"
        encoding = "latin-1" if url.startswith("http://pubmed.fixture") else "utf-8"
        (PAGES / name).write_bytes(body.encode(encoding))
        index.append(f"{url}\t{name}")
    for url, body in sorted(texts.items()):
        name = fnv1a64(url) + ".txt"
        (PAGES / name).write_text(body, encoding="utf-8")
        index.append(f"{url}\t{name}")
    (PAGES / "index.tsv").write_text("\n".join(index) + "\n", encoding="utf-8")

    (DATA / "service.toml").write_text(SERVICE_TOML, encoding="utf-8")

    records = []
    for i, r in enumerate(D, 1):
        records.append({"title": r["title"], "authors": [a.strip() for a in r["authors"].split(",")],
                        "venue_raw": r["venue"], "date": r["year"], "url": r["url"], "source_id": "dblp",
                        "source_rank": i})
    for i, r in enumerate(P, 1):
        records.append({"title": r["title"], "authors": [a.strip() for a in r["authors"].split(";")],
                        "venue_raw": r["venue"], "date": int(r["date"][:4]), "url": r["url"],
                        "abstract": r["abstract"], "source_id": "pubmed", "source_rank": i})
    (DATA / "records").mkdir(exist_ok=True)
    (DATA / "records" / "scenario.jsonl").write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    print(f"wrote {len(pages)} pages, {len(texts)} sidecar texts, {len(corpus_maps())} maps")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--check", action="store_true", help="verify scenario outcomes without writing")
    build(ap.parse_args().check)
    sys.exit(0)
