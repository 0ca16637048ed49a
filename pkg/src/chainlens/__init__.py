"""chainlens: Benchmark multimodal foundation models on classical vision tasks via prompt chains."""

__version__ = "0.1.0"
