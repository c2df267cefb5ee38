"""Time-frequency analysis on finite cyclic grids: STFT, Gabor frames, Zak, sampling, Bargmann."""
