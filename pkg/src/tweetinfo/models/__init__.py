"""From-scratch classifiers with a uniform fit/predict contract.

All models consume a :class:`~tweetinfo.features.FeatureMatrix` and integer
label codes (1 = INFORMATIVE, 0 = UNINFORMATIVE); every decision tie breaks
toward the positive class.  Fitting is deterministic given (data, config,
seed) and every model serializes to a versioned JSON document.
"""

from .base import make_model, model_to_document, model_from_document, MODEL_KINDS
from .dummy import StratifiedDummy
from .logreg import LogisticRegression
from .naive_bayes import MultinomialNaiveBayes
from .neighbors import KNearestNeighbors
from .svm import SupportVectorMachine
from .tree import DecisionTree, RandomForest

__all__ = [
    "DecisionTree",
    "KNearestNeighbors",
    "LogisticRegression",
    "MODEL_KINDS",
    "MultinomialNaiveBayes",
    "RandomForest",
    "StratifiedDummy",
    "SupportVectorMachine",
    "make_model",
    "model_from_document",
    "model_to_document",
]
