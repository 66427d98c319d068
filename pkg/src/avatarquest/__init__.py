"""avatarquest: teach players a system-generated avatar identity through a
four-pictures-one-word game, then use it to answer password-reset security
questions. Includes the scheduler, scoring economy, fallback-auth verifier,
event-sourced service, and a simulation lab for rehearsal and guessing-attack
evaluation.
"""

__version__ = "0.1.0"
