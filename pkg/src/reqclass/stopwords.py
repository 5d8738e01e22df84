"""The stopword list applied during pre-processing.

The list is fixed and versioned: golden tests pin its behaviour, so any
edit here is a breaking change and must bump STOPWORDS_VERSION. Matching
happens on lowercased lemmas, so the list carries lemma forms (be, have)
alongside the surface forms that lemmatizers occasionally leave intact.
Modal verbs (shall, should, must, ...) are included: in requirements text
they appear in nearly every statement and carry no class signal.
"""

from __future__ import annotations

STOPWORDS_VERSION = 1

STOPWORDS: frozenset[str] = frozenset(
    """
    a about above after again against all also am an and any are aren't as
    at be because been before being below between both but by can cannot
    can't could couldn't did didn't do does doesn't doing don't down during
    each etc few for from further had hadn't has hasn't have haven't having
    he her here hers herself he's him himself his how i if in into is isn't
    it it's its itself just may me might more most must my myself no nor
    not of off on once only onto or other ought our ours ourselves out over
    own per same shall she she's should shouldn't so some such than that
    that's the their theirs them themselves then there there's these they
    they're this those through to too under until up upon us very via was
    wasn't we we're well were weren't what when where which while who whom
    whose why will with within without won't would wouldn't you your yours
    yourself yourselves you're i'm i've i'd i'll we've we'll they've
    they'll you've you'll
    """.split()
)
