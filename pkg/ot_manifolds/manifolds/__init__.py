"""OT manifolds, their (1,1)-form, Inoue surfaces and subfield embeddings."""
