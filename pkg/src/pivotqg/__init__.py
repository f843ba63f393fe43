"""Answer-pivoted question generation workbench.

Pipeline: review raw text, pick pivotal answer spans, generate questions
with a sparsemax-attention copy decoder, filter unanswerable ones with a
span-scoring model, and present the survivors grouped by answer facets.
"""

__version__ = "0.1.0"
