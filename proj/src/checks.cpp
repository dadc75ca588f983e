namespace necklace {}
