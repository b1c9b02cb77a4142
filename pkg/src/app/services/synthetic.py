import numpy as np

from app.models.dataset import Dataset


def make_gaussian_dataset(n: int = 1000, label_noise: float = 0.2, seed: int = 0) -> Dataset:
    """Two unit-variance 2-D Gaussians centred at (-1, 0) and (1, 0).

    Half of the points come from each class; labels of points with ``|x0| < 1``
    (the overlap between the two means) are flipped with probability ``label_noise``.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 <= label_noise <= 1.0:
        raise ValueError(f"label_noise must lie in [0, 1], got {label_noise}")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    labels = np.arange(n) % 2
    centres = np.where(labels == 1, 1.0, -1.0)
    features = rng.standard_normal((n, 2))
    features[:, 0] += centres

    overlap = np.abs(features[:, 0]) < 1.0
    flip = overlap & (rng.random(n) < label_noise)
    labels = np.where(flip, 1 - labels, labels)
    return Dataset(
        features=features,
        labels=labels,
        class_count=2,
        feature_names=("x0", "x1"),
        class_labels=("neg", "pos"),
    )
