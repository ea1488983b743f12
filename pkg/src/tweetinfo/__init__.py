"""Tweet informativeness classification toolkit.

Library layout:

- ``corpus``      TSV dataset loading, stratified fold plans
- ``preprocess``  composable Twitter-aware cleaning stages
- ``features``    n-gram count / TF-IDF vectorizers and engineered tweet features
- ``models``      from-scratch classifiers with a uniform fit/predict contract
- ``fusion``      embedding-table ingestion and embedding+feature fusion
- ``evaluation``  metrics, cross-validation harness, weight inspection
- ``cli``         command-line experiment runner
"""

__version__ = "0.1.0"
