"""Simulator and analysis harness for two single-photon semi-quantum dialogue protocols."""

from .adversary import (Adversary, BasisPolicy, FakeStateInjection, InterceptResend,
                        KnowledgeRecord, MeasureResend, Passive, guess_messages,
                        make_adversary)
from .analysis import (ExperimentSpec, Report, count_resources, efficiency,
                       leakage_audit, run_experiment)
from .channel import Permutation, PhotonBlock, Transcript, permute, send_block, unpermute
from .errors import (ConfigError, InsufficientZPhotons, ProtocolAbort, ProtocolError,
                     SQDError, ThresholdAbort)
from .protocol1 import Protocol1Config, Protocol1Outcome, run_protocol1
from .protocol2 import Protocol2Config, Protocol2Outcome, run_protocol2
from .qubit import (MINUS, ONE, PLUS, ZERO, Basis, Pauli, Photon, Rng, apply_pauli,
                    measure, prepare)

__version__ = "0.1.0"
