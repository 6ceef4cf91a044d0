from src.egw.measures.generator import instance_rng, random_instance, random_measure
from src.egw.measures.ingestion import (
    from_weights,
    load_measure,
    load_raster,
    raster_to_measure,
    rotate_measure,
    rotate_raster,
    save_measure,
)
from src.egw.measures.measure import (
    DiscreteMeasure,
    Moments,
    center,
    moments,
    normalize,
    rotation_matrix,
    transform,
)
