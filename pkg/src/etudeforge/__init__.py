"""EtudeForge: personalized music education tooling.

Analyzes audio tracks (beats + chords) to drive ear-training quizzes, and
transforms piano MusicXML scores into simplified arrangements with targeted
exercises.
"""

__version__ = "0.1.0"
