"""Tweet sentence-embedding exporter.

Reads the shared-task TSV format, runs a BERT encoder (pretrained or
fine-tuned on the labeled tweets), and writes one embedding per tweet in the
EMB1 interchange format consumed by the classification toolkit. This package
talks to that toolkit only through files: TSV in, EMB1 out.
"""

__version__ = "0.1.0"
