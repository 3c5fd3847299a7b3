"""
Pairing VQE Lab - variational pairing energies on simulated noisy qubits
Author: jsecco ®
"""
