"""Spatio-temporal scenario mining and benchmark toolkit for driving scenes.

The pipeline: load interchange scenes, mine typed scenarios from
ground-truth trajectories against an HD map, subsample them spatially,
collect human verification through a review service, generate balanced
multiple-choice questions, and score model answers.
"""

__version__ = "0.1.0"
