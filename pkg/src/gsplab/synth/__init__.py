from .mapping import ProsodyMap, ProsodyParams, map_latent_to_prosody
from .render import AudioBuffer, render, render_params, encode_wav, decode_wav
from .sentences import SentenceScore, Syllable, get_sentence, known_sentences
from .cache import StimulusCache, render_slider_batch, BatchRenderError
from .external import ExternalRenderer, RenderBackendError

__all__ = [
    "ProsodyMap", "ProsodyParams", "map_latent_to_prosody",
    "AudioBuffer", "render", "render_params", "encode_wav", "decode_wav",
    "SentenceScore", "Syllable", "get_sentence", "known_sentences",
    "StimulusCache", "render_slider_batch", "BatchRenderError",
    "ExternalRenderer", "RenderBackendError",
]
