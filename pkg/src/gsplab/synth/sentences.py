"""Built-in sentence scores for the parametric synthesizer.

Each sentence is a list of syllables (nominal duration, pitch offset in
semitones relative to the utterance mean, vowel class). These stand in
for phonologically balanced, semantically neutral text; the synthesizer
only needs timing, pitch shape and vowel color.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Syllable:
    base_duration: float        # seconds at rate 1.0
    base_pitch_offset: float    # semitones
    vowel_class: str            # one of a e i o u


@dataclass(frozen=True)
class SentenceScore:
    sentence_id: str
    syllables: tuple[Syllable, ...]

    def __post_init__(self):
        if not self.syllables:
            raise ValueError("sentence needs at least one syllable")
        for s in self.syllables:
            if s.base_duration <= 0:
                raise ValueError("syllable durations must be positive")
            if s.vowel_class not in ("a", "e", "i", "o", "u"):
                raise ValueError(f"unknown vowel class {s.vowel_class!r}")


def _score(sid, syls):
    return SentenceScore(sid, tuple(Syllable(*s) for s in syls))


# Original experiment sentences.
_BANK = {
    "s1": _score("s1", [(0.16, 2.0, "a"), (0.14, 1.0, "e"), (0.18, 0.0, "i"),
                        (0.14, -1.0, "o"), (0.16, 0.5, "a"), (0.22, -2.5, "u")]),
    "s2": _score("s2", [(0.14, 1.5, "o"), (0.16, 2.5, "a"), (0.14, 0.5, "e"),
                        (0.18, -0.5, "u"), (0.14, 0.0, "i"), (0.20, -3.0, "o")]),
    "s3": _score("s3", [(0.18, 0.0, "e"), (0.14, 2.0, "i"), (0.16, 1.0, "a"),
                        (0.14, -1.5, "e"), (0.16, 0.5, "o"), (0.22, -2.0, "a")]),
    # Novel sentences for transfer stimuli.
    "n1": _score("n1", [(0.15, 1.0, "i"), (0.17, 2.0, "o"), (0.14, 0.0, "a"),
                        (0.16, -1.0, "e"), (0.20, -2.0, "u")]),
    "n2": _score("n2", [(0.16, 2.5, "a"), (0.14, 1.5, "u"), (0.18, 0.5, "e"),
                        (0.14, -0.5, "i"), (0.16, 0.0, "o"), (0.20, -2.5, "e")]),
    "n3": _score("n3", [(0.14, 0.5, "u"), (0.18, 2.0, "e"), (0.14, 1.0, "o"),
                        (0.16, -1.0, "a"), (0.14, 0.0, "i"), (0.22, -1.5, "o")]),
    "n4": _score("n4", [(0.17, 1.5, "e"), (0.15, 0.0, "a"), (0.16, 2.0, "i"),
                        (0.14, -0.5, "o"), (0.18, -2.0, "a"), (0.16, -1.0, "u")]),
}


def get_sentence(sentence_id: str) -> SentenceScore:
    try:
        return _BANK[sentence_id]
    except KeyError:
        raise KeyError(f"unknown sentence id {sentence_id!r}; "
                       f"known: {sorted(_BANK)}")


def known_sentences() -> list[str]:
    return sorted(_BANK)
