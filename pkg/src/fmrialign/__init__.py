"""ROI-structured fMRI autoencoding, latent-space ridge alignment, and evaluation.

The pipeline: tokenize an fMRI signal by brain region, compress it through a
transformer autoencoder whose decoder sees only the CLS latent, fit per-subject
ridge maps between that latent space and a stimulus-embedding space, and score
both directions (signal prediction and embedding retrieval) with a
retrieval-based metric suite.
"""

__version__ = "0.1.0"
