"""Deterministic toy toolkit for game-video generation pipelines and
dataset curation: an exact pixel<->latent codec, a flow-style Euler
sampler with masked inpainting, seamless texture synthesis, tiled video
super-resolution, keyboard-driven camera trajectories with per-pixel ray
embeddings, autoregressive timeline extension, a tiered curation pipeline,
and an interactive steering service."""

__version__ = "0.1.0"
